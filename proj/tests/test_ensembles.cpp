#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tnsign/ensembles.hpp"

using namespace tnsign;

TEST_CASE("haar vector: unit norm, n=1 gives a sign") {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    DenseTensor v = sample_haar_vector(16, Field::Real, rng);
    CHECK(std::abs(v.frob_norm() - 1.0) < 1e-12);
    DenseTensor w = sample_haar_vector(16, Field::Complex, rng);
    CHECK(std::abs(w.frob_norm() - 1.0) < 1e-12);
  }
  DenseTensor one = sample_haar_vector(1, Field::Real, rng);
  CHECK(std::abs(std::abs(one.at(0).real()) - 1.0) < 1e-15);
  CHECK_THROWS_AS(sample_haar_vector(0, Field::Real, rng), Error);
}

TEST_CASE("haar vector coordinates have zero mean (statistical, 1e5 samples)") {
  Rng rng(2);
  const int n = 16, samples = 100000;
  std::vector<double> mean(n, 0.0);
  for (int s = 0; s < samples; ++s) {
    DenseTensor v = sample_haar_vector(n, Field::Real, rng);
    for (int i = 0; i < n; ++i) mean[i] += v.at(i).real();
  }
  // coordinates have std 1/sqrt(n); allow 4 sigma
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(mean[i] / samples) < 4.0 / std::sqrt(double(n) * samples));
}

TEST_CASE("site tensor is linear in lambda with a fixed seed") {
  LegMask bulk{true, true, true, true};
  EnsembleSpec s0{EnsembleKind::HaarOrthogonal, 3, 0.0, {}, 77};
  EnsembleSpec s1 = s0;
  s1.shift = 0.7;
  Rng r0(5), r1(5);
  DenseTensor a0 = make_site_tensor(s0, bulk, r0);
  DenseTensor a1 = make_site_tensor(s1, bulk, r1);
  for (std::int64_t i = 0; i < a0.size(); ++i)
    CHECK(a1.at(i).real() - a0.at(i).real() == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("haar part of a bulk tensor has Frobenius norm exactly D^2") {
  LegMask bulk{true, true, true, true};
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 4, 0.0, {}, 3};
  Rng rng(9);
  DenseTensor a = make_site_tensor(spec, bulk, rng);
  CHECK(a.frob_norm() == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("entry std near 1 for the orthogonal ensemble (D=4, 1e4 entries)") {
  LegMask bulk{true, true, true, true};
  double sumsq = 0.0;
  std::int64_t count = 0;
  for (int t = 0; t < 40; ++t) {
    EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 4, 0.0, {}, 1000 + std::uint64_t(t)};
    Rng rng(derive_seed(spec.seed, {0}));
    DenseTensor a = make_site_tensor(spec, bulk, rng);
    for (std::int64_t i = 0; i < a.size(); ++i) sumsq += std::norm(a.at(i));
    count += a.size();
  }
  double std_dev = std::sqrt(sumsq / double(count));
  CHECK(std_dev > 0.9);
  CHECK(std_dev < 1.1);
}

TEST_CASE("gaussian ensembles: mean lambda, entry std 1 (4 sigma, 1e4 samples)") {
  LegMask bulk{true, true, true, true};
  for (auto kind : {EnsembleKind::GaussianReal, EnsembleKind::GaussianComplex}) {
    double lambda = 0.8;
    cx sum = 0.0;
    double dev2 = 0.0;
    std::int64_t count = 0;
    for (int t = 0; t < 40; ++t) {
      EnsembleSpec spec{kind, 4, lambda, {}, 555 + std::uint64_t(t)};
      Rng rng(derive_seed(spec.seed, {0}));
      DenseTensor a = make_site_tensor(spec, bulk, rng);
      for (std::int64_t i = 0; i < a.size(); ++i) {
        sum += a.at(i);
        dev2 += std::norm(a.at(i) - cx(lambda));
      }
      count += a.size();
    }
    double mean_err = std::abs(sum / double(count) - cx(lambda));
    CHECK(mean_err < 4.0 / std::sqrt(double(count)));
    CHECK(std::abs(dev2 / double(count) - 1.0) < 4.0 * std::sqrt(2.0 / double(count)));
  }
}

TEST_CASE("reproducibility: same spec and site stream give identical tensors") {
  LegMask m{false, true, true, true};
  EnsembleSpec spec{EnsembleKind::HaarUnitary, 3, 0.4, {TargetKind::Rank1Haar, 0}, 11};
  Rng r1(derive_seed(spec.seed, {2, 5})), r2(derive_seed(spec.seed, {2, 5}));
  DenseTensor a = make_site_tensor(spec, m, r1);
  DenseTensor b = make_site_tensor(spec, m, r2);
  for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a.at(i) == b.at(i));
}

TEST_CASE("rank1signed target: balanced signs on left/up legs") {
  LegMask bulk{true, true, true, true};
  for (std::int64_t D : {3, 4}) {
    EnsembleSpec spec{EnsembleKind::HaarOrthogonal, D, 1.0, {TargetKind::Rank1Signed, 0}, 1};
    Rng rng(1);
    DenseTensor s = target_tensor(spec, bulk, rng);
    for (std::int64_t i = 0; i < s.size(); ++i)
      CHECK(std::abs(std::abs(s.at(i).real()) - 1.0) < 1e-15);
    // overlap of adjacent S along a shared edge: right leg (ones) against the
    // neighbor's signed left leg sums to 0 (even D) or 1 (odd D)
    double row_sum = 0.0;
    for (std::int64_t x = 0; x < D; ++x) row_sum += (x % 2 == 0) ? 1.0 : -1.0;
    CHECK(std::abs(row_sum - (D % 2 == 0 ? 0.0 : 1.0)) < 1e-15);
  }
}

TEST_CASE("positiverandom target: entries in [0,2], site-fixed") {
  LegMask bulk{true, true, true, true};
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 3, 1.0, {TargetKind::PositiveRandom, 42}, 1};
  Rng r1(1), r2(999);
  DenseTensor s1 = target_tensor(spec, bulk, r1);
  DenseTensor s2 = target_tensor(spec, bulk, r2);  // different site stream, same tensor
  for (std::int64_t i = 0; i < s1.size(); ++i) {
    CHECK(s1.at(i).real() >= 0.0);
    CHECK(s1.at(i).real() <= 2.0);
    CHECK(s1.at(i) == s2.at(i));
  }
}

TEST_CASE("rank1haar target: rank one with sqrt(D)-scaled leg vectors") {
  LegMask bulk{true, true, true, true};
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 4, 1.0, {TargetKind::Rank1Haar, 0}, 1};
  Rng rng(4);
  DenseTensor s = target_tensor(spec, bulk, rng);
  // Frobenius norm = prod |v_leg| = D^2 for four sqrt(D)-normalized vectors
  CHECK(s.frob_norm() == doctest::Approx(16.0).epsilon(1e-10));
  // rank 1 across any bipartition
  SvdSplit split = svd_split(s, {0, 2}, 100, 1e-24);
  CHECK(split.kept_spectrum.size() == 1);
}

TEST_CASE("peps tensor: unit norm, trimmed shapes, concentration") {
  PepsSpec spec{2, 4, 17};
  Rng rng(3);
  DenseTensor c = make_peps_tensor(spec, rng);
  CHECK(c.rank() == 5);
  CHECK(std::abs(c.frob_norm() - 1.0) < 1e-12);

  PepsSpec one{1, 1, 5};
  Rng rng2(4);
  DenseTensor u = make_peps_tensor(one, rng2);
  CHECK(std::abs(std::abs(u.at(0)) - 1.0) < 1e-12);

  // different seeds: small overlap for d*D^4 = 1024
  PepsSpec big{4, 4, 100};
  Rng ra(derive_seed(1, {1})), rb(derive_seed(2, {1}));
  DenseTensor x = make_peps_site_tensor(big, LegMask{true, true, true, true}, ra);
  DenseTensor y = make_peps_site_tensor(big, LegMask{true, true, true, true}, rb);
  cx overlap = 0.0;
  for (std::int64_t i = 0; i < x.size(); ++i) overlap += x.at(i) * std::conj(y.at(i));
  CHECK(std::abs(overlap) < 0.2);

  LegMask corner{false, true, false, true};
  Rng rc(8);
  DenseTensor cc = make_peps_site_tensor(spec, corner, rc);
  CHECK(cc.rank() == 3);
  CHECK(cc.dim(0) == 4);
  CHECK(cc.dim(1) == 2);
}

TEST_CASE("invalid ranks are rejected") {
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 3, 0.0, {}, 1};
  Rng rng(1);
  LegMask one_leg{true, false, false, false};
  CHECK_THROWS_AS(make_site_tensor(spec, one_leg, rng), Error);
}
