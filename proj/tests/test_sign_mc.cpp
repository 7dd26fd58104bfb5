#include <doctest.h>

#include <bit>
#include <cmath>

#include "support/oracles.hpp"
#include "tnsign/sign_mc.hpp"

using namespace tnsign;

TEST_CASE("mc estimate is exact with zero stderr on an all-ones network") {
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 2, 1.0, {}, 0};
  LatticeNetwork net = sample_network(spec, Geometry::OpenRect, 2, 2);
  for (auto& t : net.tensors) t = DenseTensor::filled(t.shape(), 1.0);
  Rng rng(3);
  McEstimate est = mc_estimate_value(net, 50, rng);
  CHECK(est.mean.real() == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(est.stderr_est == doctest::Approx(0.0));
}

TEST_CASE("positive 3x3 instance: estimate within 3 stderr, K^{-1/2} shrink") {
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 2, 3.0, {}, 5};
  LatticeNetwork net = sample_network(spec, Geometry::OpenRect, 3, 3);
  ContractionValue exact = brute_force_value(net);
  double exact_val = exact.value.real();

  Rng rng(11);
  McEstimate small = mc_estimate_value(net, 1000, rng);
  McEstimate big = mc_estimate_value(net, 100000, rng);
  CHECK(std::abs(big.mean.real() - exact_val) < 3.0 * big.stderr_est);
  double ratio_small = small.stderr_est / std::abs(small.mean);
  double ratio_big = big.stderr_est / std::abs(big.mean);
  // noise-to-signal shrinks roughly as K^{-1/2}: a factor 10 in sqrt(K)
  CHECK(ratio_big < ratio_small / 5.0);
}

TEST_CASE("unshifted instance has a worse noise-to-signal ratio") {
  EnsembleSpec pos{EnsembleKind::HaarOrthogonal, 2, 3.0, {}, 6};
  EnsembleSpec sgn{EnsembleKind::HaarOrthogonal, 2, 0.0, {}, 6};
  LatticeNetwork pnet = sample_network(pos, Geometry::OpenRect, 3, 3);
  LatticeNetwork snet = sample_network(sgn, Geometry::OpenRect, 3, 3);
  Rng r1(21), r2(21);
  McEstimate pe = mc_estimate_value(pnet, 20000, r1);
  McEstimate se = mc_estimate_value(snet, 20000, r2);
  CHECK(se.stderr_est / std::abs(se.mean) > pe.stderr_est / std::abs(pe.mean));
}

TEST_CASE("delta_f = 0 exactly when lambda >= D^2 (orthogonal)") {
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 2, 5.0, {}, 9};
  DeltaFRecord rec = cylinder_delta_f(spec, 4, 120, 20);
  CHECK(std::abs(rec.delta_f) < 1e-9);
}

TEST_CASE("tiny cylinder matches the enumeration oracle") {
  // W=2, L=6, lambda=2: close the end legs with ones and enumerate
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 2, 2.0, {}, 41};
  const std::int64_t W = 2, L = 6;
  DeltaFRecord rec = cylinder_delta_f(spec, W, L, 0);

  LatticeNetwork net = delta_f_cylinder_network(spec, W, L);
  LatticeNetwork closed = close_open_legs_with_ones(net);
  ContractionValue c = brute_force_value(closed);
  ContractionValue cb = brute_force_value(abs_network(closed));
  double df_enum = -(c.log_magnitude - cb.log_magnitude) / double(W * L);
  CHECK(std::abs(rec.delta_f - df_enum) < 0.02);
}

TEST_CASE("slice series is stationary after burn-in") {
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 3, 0.3, {}, 13};
  DeltaFRecord rec = cylinder_delta_f(spec, 4, 400, 20);
  const auto& s = rec.slice_series;
  std::int64_t kept = rec.L - rec.burn_in;
  std::int64_t half = kept / 2;
  auto stats = [&](std::int64_t begin, std::int64_t end) {
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t t = begin; t < end; ++t) {
      sum += s[t];
      sumsq += s[t] * s[t];
    }
    double n = double(end - begin);
    double mean = sum / n;
    double var = (sumsq - sum * sum / n) / (n - 1);
    return std::pair<double, double>(mean, std::sqrt(std::max(0.0, var) / n));
  };
  auto [m1, e1] = stats(rec.burn_in, rec.burn_in + half);
  auto [m2, e2] = stats(rec.burn_in + half, rec.L);
  CHECK(std::abs(m1 - m2) < 3.0 * std::sqrt(e1 * e1 + e2 * e2) + 1e-12);
}

TEST_CASE("delta_f monotone over the lambda grid (orthogonal D=3, 20 realizations)") {
  std::vector<double> grid{0.0, 0.3, 1.0, 3.0};
  std::vector<double> means;
  for (double lam : grid) {
    double acc = 0.0;
    const int n = 20;
    for (int t = 0; t < n; ++t) {
      EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 3, lam, {},
                        derive_seed(500, {std::uint64_t(t), std::bit_cast<std::uint64_t>(lam)})};
      acc += cylinder_delta_f(spec, 3, 150, 15).delta_f;
    }
    means.push_back(acc / n);
  }
  for (std::size_t i = 1; i < means.size(); ++i) CHECK(means[i] < means[i - 1] + 0.02);
}

TEST_CASE("complex ensembles track phase separately") {
  EnsembleSpec spec{EnsembleKind::HaarUnitary, 2, 0.5, {}, 77};
  DeltaFRecord rec = cylinder_delta_f(spec, 3, 100, 10);
  CHECK(std::abs(std::abs(rec.final_phase) - 1.0) < 1e-9);
  CHECK(rec.delta_f > 0.0);
}

TEST_CASE("guards and argument checks") {
  EnsembleSpec spec{EnsembleKind::HaarOrthogonal, 4, 0.0, {}, 1};
  CHECK_THROWS_AS(cylinder_delta_f(spec, 9, 100, 10), Error);   // 4^9 > 2^16
  CHECK_THROWS_AS(cylinder_delta_f(spec, 1, 100, 10), Error);   // W < 2
  CHECK_THROWS_AS(cylinder_delta_f(spec, 4, 100, 100), Error);  // burn_in >= L
  EnsembleSpec small{EnsembleKind::HaarOrthogonal, 2, 0.0, {}, 1};
  LatticeNetwork net = sample_network(small, Geometry::OpenRect, 2, 2);
  Rng rng(1);
  CHECK_THROWS_AS(mc_estimate_value(net, 1, rng), Error);
}
