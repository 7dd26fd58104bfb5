#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tnsign/boundary_mps.hpp"

using namespace tnsign;

namespace {

// Dense contraction of a block with open right-edge legs, by brute force
// over all internal edge configurations.
DenseTensor dense_block_state(const LatticeNetwork& block) {
  const std::int64_t H = block.rows, W = block.cols, D = block.bond_dim;
  std::int64_t out_n = 1;
  for (std::int64_t r = 0; r < H; ++r) out_n *= D;
  // enumerate open-leg values, closing them with basis vectors
  std::vector<cx> data(static_cast<std::size_t>(out_n));
  std::vector<std::int64_t> open_vals(static_cast<std::size_t>(H));
  for (std::int64_t o = 0; o < out_n; ++o) {
    std::int64_t rem = o;
    for (std::int64_t r = H; r-- > 0;) {
      open_vals[r] = rem % D;
      rem /= D;
    }
    LatticeNetwork closed = block;
    closed.open_right_edge = false;
    for (std::int64_t r = 0; r < H; ++r) {
      std::vector<double> basis(static_cast<std::size_t>(D), 0.0);
      basis[open_vals[r]] = 1.0;
      auto& m = closed.masks[r * W + W - 1];
      int pos = m.left ? 1 : 0;  // right leg position: after left if present
      closed.tensors[r * W + W - 1] = contract_pair(
          closed.tensors[r * W + W - 1], {pos}, DenseTensor::from_real({D}, basis), {0});
      m.right = false;
    }
    ContractionValue v = brute_force_value(closed);
    data[o] = v.value;
  }
  std::vector<std::int64_t> shape(static_cast<std::size_t>(H), D);
  return DenseTensor::from_complex(shape, std::move(data));
}

double dense_renyi2(const DenseTensor& psi, std::int64_t cut) {
  // reduced density matrix across the cut by explicit reshaping
  std::int64_t m = 1, n = 1;
  for (int i = 0; i < psi.rank(); ++i)
    (i < cut ? m : n) *= psi.dim(i);
  // rho_A[a,a'] = sum_b psi[a,b] conj(psi[a',b]) / norm
  std::vector<cx> rho(static_cast<std::size_t>(m * m), cx(0.0));
  double norm = 0.0;
  for (std::int64_t a = 0; a < m; ++a)
    for (std::int64_t b = 0; b < n; ++b) norm += std::norm(psi.at(a * n + b));
  for (std::int64_t a = 0; a < m; ++a)
    for (std::int64_t a2 = 0; a2 < m; ++a2) {
      cx acc = 0.0;
      for (std::int64_t b = 0; b < n; ++b)
        acc += psi.at(a * n + b) * std::conj(psi.at(a2 * n + b));
      rho[a * m + a2] = acc / norm;
    }
  double purity = 0.0;
  for (std::int64_t a = 0; a < m; ++a)
    for (std::int64_t a2 = 0; a2 < m; ++a2)
      purity += (rho[a * m + a2] * rho[a2 * m + a]).real();
  return -std::log(purity);
}

LatticeNetwork sample_block(EnsembleKind kind, std::int64_t D, double lambda,
                            std::int64_t H, std::int64_t W, std::uint64_t seed) {
  EnsembleSpec spec{kind, D, lambda, {}, seed};
  NetworkOptions opts;
  opts.open_right_edge = true;
  return sample_network(spec, Geometry::OpenRect, H, W, opts);
}

}  // namespace

TEST_CASE("W=1 block is exact with zero truncation") {
  LatticeNetwork block = sample_block(EnsembleKind::HaarOrthogonal, 2, 0.3, 4, 1, 11);
  BoundaryMps psi = boundary_mps_of_block(block, 8, 0.0);
  CHECK(psi.cumulative_truncation == 0.0);
  DenseTensor dense = dense_block_state(block);
  DenseTensor rec = mps_to_dense(psi);
  CHECK(oracles::rel_diff(rec.to_complex(), dense) < 1e-10);
}

TEST_CASE("W=2 H=4 D=2 block matches dense contraction and dense entropy") {
  for (auto kind : {EnsembleKind::HaarOrthogonal, EnsembleKind::HaarUnitary}) {
    LatticeNetwork block = sample_block(kind, 2, 0.2, 4, 2, 23);
    BoundaryMps psi = boundary_mps_of_block(block, 16, 0.0);
    DenseTensor dense = dense_block_state(block);
    DenseTensor rec = mps_to_dense(psi);
    CHECK(oracles::rel_diff(rec.to_complex(), dense) < 1e-8);
    for (std::int64_t cut = 1; cut < 4; ++cut) {
      EntropyRecord er = renyi_entropy(psi, cut, 2.0);
      CHECK(er.s2 == doctest::Approx(dense_renyi2(dense, cut)).epsilon(1e-7));
    }
  }
}

TEST_CASE("large shift kills the entanglement at every cut") {
  LatticeNetwork block = sample_block(EnsembleKind::HaarOrthogonal, 2, 10.0, 8, 2, 31);
  BoundaryMps psi = boundary_mps_of_block(block, 16, 1e-12);
  for (std::int64_t cut = 1; cut < 8; ++cut)
    CHECK(renyi_entropy(psi, cut, 2.0).s2 < 0.05);
}

TEST_CASE("renyi entropy from explicit spectra") {
  EntropyRecord rec;
  // product state
  CHECK(renyi_from_spectrum({1.0}, 2.0) == 0.0);
  CHECK(renyi_from_spectrum({1.0}, 1.0) == 0.0);
  // flat rank 3
  std::vector<double> flat{1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (double alpha : {0.5, 1.0, 2.0, 3.0})
    CHECK(renyi_from_spectrum(flat, alpha) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  // Renyi-2 never exceeds von Neumann
  std::vector<double> p{0.5, 0.3, 0.15, 0.05};
  CHECK(renyi_from_spectrum(p, 2.0) <= renyi_from_spectrum(p, 1.0));
}

TEST_CASE("schmidt spectrum invariants and the entanglement ceiling") {
  LatticeNetwork block = sample_block(EnsembleKind::HaarOrthogonal, 2, 0.0, 8, 2, 47);
  BoundaryMps psi = boundary_mps_of_block(block, 16, 0.0);
  auto spectra = schmidt_spectra(psi);
  const std::int64_t H = 8, W = 2, D = 2;
  for (std::int64_t cut = 1; cut < H; ++cut) {
    double sum = 0.0;
    double prev = 1e300;
    for (double p : spectra[cut]) {
      CHECK(p >= 0.0);
      CHECK(p <= prev + 1e-12);
      prev = p;
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    double bound = std::log(double(D)) *
                   std::min({double(cut), double(H - cut), double(W)});
    CHECK(renyi_from_spectrum(spectra[cut], 2.0) <= bound + 1e-9);
    // alpha-monotonicity on the real spectrum
    CHECK(renyi_from_spectrum(spectra[cut], 2.0) <=
          renyi_from_spectrum(spectra[cut], 1.0) + 1e-12);
  }
}

TEST_CASE("block_boundary_state defaults and argument errors") {
  BlockSpec bs;
  bs.W = 2;
  bs.ensemble = EnsembleSpec{EnsembleKind::HaarOrthogonal, 2, 0.5, {}, 3};
  BoundaryMps psi = block_boundary_state(bs, 0, 1e-12);
  CHECK(psi.length() == 8);  // H defaults to 4W
  CHECK_THROWS_AS(block_boundary_state(bs, 1, 1e-12), Error);  // chi < D
  CHECK_THROWS_AS(renyi_entropy(psi, 0, 2.0), Error);
  CHECK_THROWS_AS(renyi_entropy(psi, 8, 2.0), Error);
  CHECK_THROWS_AS(renyi_entropy(psi, 4, -1.0), Error);
}

TEST_CASE("truncated chi reproduces the dominant spectrum") {
  // hard instance; compare the top of the spectrum at chi=64 vs exact
  LatticeNetwork block = sample_block(EnsembleKind::HaarOrthogonal, 2, 0.0, 8, 3, 53);
  BoundaryMps exact = boundary_mps_of_block(block, 1 << 10, 0.0);
  BoundaryMps trunc = boundary_mps_of_block(block, 6, 1e-12);
  double se = renyi_entropy(exact, 4, 2.0).s2;
  double st = renyi_entropy(trunc, 4, 2.0).s2;
  CHECK(std::abs(se - st) < 0.2);  // chi=6 of max 8 already close
  CHECK(trunc.cumulative_truncation > 0.0);
  CHECK(trunc.max_bond_dim() <= 6);
}

TEST_CASE("entropy_scan determinism and aggregation") {
  EntropyScanSpec spec;
  spec.kind = EnsembleKind::HaarOrthogonal;
  spec.Ds = {2};
  spec.grid = {0.5, 2.0};
  spec.Ws = {2};
  spec.trials = 3;
  spec.master_seed = 12;
  spec.conv_check_trials = 2;
  EntropyScanResult a = entropy_scan(spec);
  EntropyScanResult b = entropy_scan(spec);
  REQUIRE(a.rows.size() == 6);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].s2 == b.rows[i].s2);
    CHECK(a.rows[i].seed == b.rows[i].seed);
  }
  REQUIRE(a.points.size() == 2);
  for (const auto& p : a.points) {
    CHECK(p.n == 3);
    CHECK(p.mean_s2 >= 0.0);
    CHECK(p.converged);  // chi = D^W = 4 is exact here
  }
  // lambda decreases entanglement on average
  CHECK(a.points[0].mean_s2 > a.points[1].mean_s2);
}

TEST_CASE("half_value_crossover interpolation") {
  std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
  std::vector<double> ys{2.0, 1.5, 0.5, 0.1};
  double x = half_value_crossover(xs, ys);
  CHECK(x == doctest::Approx(1.5));
  std::vector<double> flat{2.0, 2.0, 2.0, 2.0};
  CHECK(std::isnan(half_value_crossover(xs, flat)));
}
