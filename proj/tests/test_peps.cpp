#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>

#include "support/oracles.hpp"
#include "tnsign/linalg.hpp"
#include "tnsign/peps.hpp"

using namespace tnsign;

namespace {

double min_eigenvalue(const DenseTensor& herm) {
  std::vector<double> vals;
  std::vector<cx> vecs;
  linalg::eigh_complex(herm.dim(0), herm.to_complex().cdata().data(), vals, vecs);
  return vals.front();
}

double herm_error(const DenseTensor& m) {
  const std::int64_t n = m.dim(0);
  double e = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      e = std::max(e, std::abs(m.at(i * n + j) - std::conj(m.at(j * n + i))));
  return e;
}

}  // namespace

TEST_CASE("double layer: trace, PSD, d=1 rank one") {
  Rng rng(2);
  PepsSpec spec{2, 3, 7};
  DenseTensor c = make_peps_tensor(spec, rng);
  DoubleLayerTensor dl = double_layer(c);
  CHECK(dl.a.rank() == 4);
  for (int i = 0; i < 4; ++i) CHECK(dl.a.dim(i) == 4);
  CHECK(double_layer_trace(dl) == doctest::Approx(1.0).epsilon(1e-12));
  DenseTensor op = double_layer_as_operator(dl);
  CHECK(min_eigenvalue(op) >= -1e-12);

  PepsSpec rank1{2, 1, 8};
  Rng rng2(3);
  DoubleLayerTensor one = double_layer(make_peps_tensor(rank1, rng2));
  auto sv = linalg::singular_values_complex(
      16, 16, double_layer_as_operator(one).cdata().data());
  CHECK(sv[0] > 1e-3);
  CHECK(sv[1] < 1e-12);

  CHECK_THROWS_AS(double_layer(c.reshaped({3, 16, 2})), Error);
}

TEST_CASE("PSD is preserved under X (x) conj(X) gauges on composite legs") {
  Rng rng(5);
  PepsSpec spec{2, 2, 9};
  DoubleLayerTensor dl = double_layer(make_peps_tensor(spec, rng));
  // x on the single-layer leg; composite gauge is x (x) conj(x)
  DenseTensor x = DenseTensor::zeros({2, 2}, Field::Complex);
  for (auto& z : x.cdata()) z = rng.normal_complex();
  x = add(x, DenseTensor::identity(2, Field::Complex));
  DenseTensor xc =
      contract_pair(x, std::span<const int>{}, x.conjugate(), std::span<const int>{})
          .permuted(std::array<int, 4>{0, 2, 1, 3})
          .reshaped({4, 4});
  DoubleLayerTensor out = dl;
  out.a = apply_gauge_to_tensor(dl.a, xc, xc);
  CHECK(herm_error(double_layer_as_operator(out)) < 1e-10);
  CHECK(min_eigenvalue(double_layer_as_operator(out)) >= -1e-10);
}

TEST_CASE("rho_from_grouping: unit trace, Hermitian, PSD, near-identity at large d") {
  // ||rho - I/16||_F concentrates at 1/sqrt(d); check the value and the
  // isometry limit as d grows
  double prev = 1e300;
  for (std::int64_t d : {256, 1024}) {
    Rng rng(6);
    PepsSpec spec{2, d, 10};
    DoubleLayerTensor dl = double_layer(make_peps_tensor(spec, rng));
    DenseTensor rho = rho_from_grouping(dl, Grouping::LeftDown_vs_UpRight);
    const std::int64_t n = 16;
    cx tr = 0.0;
    for (std::int64_t i = 0; i < n; ++i) tr += rho.at(i * n + i);
    CHECK(std::abs(tr - 1.0) < 1e-12);
    CHECK(herm_error(rho) < 1e-12);
    CHECK(min_eigenvalue(rho) >= -1e-12);
    DenseTensor diff = add(
        rho.to_complex(), DenseTensor::identity(n, Field::Complex).scaled(cx(-1.0 / 16.0)));
    double dist = diff.frob_norm();
    CHECK(dist < 2.0 / std::sqrt(double(d)));
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK(prev < 0.05);  // d = 1024
}

TEST_CASE("separable_decompose: identity, success regime, reconstruction") {
  const std::int64_t n = 4;
  DenseTensor eye = DenseTensor::identity(n * n, Field::Complex).scaled(cx(1.0 / 16.0));
  auto r = separable_decompose(eye, n, n);
  REQUIRE(std::holds_alternative<SeparableDecomposition>(r));
  const auto& dec = std::get<SeparableDecomposition>(r);
  REQUIRE(dec.terms.size() == 1);
  CHECK(dec.terms[0].p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oracles::rel_diff(dec.terms[0].sigma_a,
                          DenseTensor::identity(n, Field::Complex).scaled(cx(0.25))) < 1e-12);

  // deep in the padding regime (d = 2048): success with exact reconstruction
  int successes = 0;
  for (int t = 0; t < 5; ++t) {
    Rng rng(derive_seed(77, {std::uint64_t(t)}));
    PepsSpec spec{2, 2048, derive_seed(77, {std::uint64_t(t)})};
    DoubleLayerTensor dl = double_layer(make_peps_tensor(spec, rng));
    DenseTensor rho = rho_from_grouping(dl, Grouping::LeftDown_vs_UpRight);
    auto res = separable_decompose(rho, n, n);
    if (std::holds_alternative<SeparableDecomposition>(res)) {
      ++successes;
      const auto& d = std::get<SeparableDecomposition>(res);
      CHECK(separable_reconstruction_error(d, rho) < 1e-10);
      for (const auto& term : d.terms) {
        CHECK(term.p > 0.0);
        CHECK(min_eigenvalue(term.sigma_a) >= -1e-12);
        CHECK(min_eigenvalue(term.sigma_b) >= -1e-12);
      }
    }
  }
  CHECK(successes == 5);
}

TEST_CASE("separable_decompose failure is a value with a witness") {
  // a pure product state is far outside the identity-padding ball
  DenseTensor rho = DenseTensor::zeros({16, 16}, Field::Complex);
  rho.cdata()[0] = 1.0;
  auto r = separable_decompose(rho, 4, 4);
  REQUIRE(std::holds_alternative<SeparableFailure>(r));
  const auto& f = std::get<SeparableFailure>(r);
  CHECK(f.offending_coefficient < 0.0);
  CHECK(f.required_mass > f.available_mass);
  // non-Hermitian input is an argument error, not a failure value
  DenseTensor bad = DenseTensor::zeros({16, 16}, Field::Complex);
  bad.cdata()[1] = 1.0;
  CHECK_THROWS_AS(separable_decompose(bad, 4, 4), Error);
}

TEST_CASE("positive-sum estimate matches the exact norm, sign-free") {
  const std::int64_t D = 2, d = 2048, rows = 2, cols = 2;
  PepsSpec spec{D, d, 91};
  auto sites = sample_double_layer_sites(spec, rows, cols);
  std::vector<SeparableDecomposition> decomps;
  for (std::int64_t idx = 0; idx < rows * cols; ++idx) {
    Grouping g = site_grouping(idx / cols, idx % cols);
    DenseTensor rho = rho_from_grouping(sites[idx], g);
    const LegMask& m = sites[idx].legs;
    auto cd = [&](bool present) { return present ? D : 1; };
    std::int64_t na, nb;
    if (g == Grouping::LeftDown_vs_UpRight) {
      na = cd(m.left) * cd(m.down);
      nb = cd(m.up) * cd(m.right);
    } else {
      na = cd(m.right) * cd(m.down);
      nb = cd(m.left) * cd(m.up);
    }
    auto res = separable_decompose(rho, na, nb);
    REQUIRE(std::holds_alternative<SeparableDecomposition>(res));
    auto dec = std::get<SeparableDecomposition>(res);
    dec.grouping = g;
    decomps.push_back(std::move(dec));
  }
  Rng rng(17);
  PositiveSumTerms terms = positive_sum_estimate(sites, rows, cols, decomps, 4000, rng);
  CHECK(terms.min_term >= -1e-12);
  CHECK(terms.negative_terms == 0);
  CHECK(terms.average_sign == doctest::Approx(1.0).epsilon(1e-12));

  LatticeNetwork net = sample_peps_norm_network(spec, rows, cols, false);
  double exact = transfer_value(net).value.real();
  CHECK(std::abs(terms.estimate.mean.real() - exact) < 3.0 * terms.estimate.stderr_est);
  // argument checks
  CHECK_THROWS_AS(positive_sum_estimate(sites, 2, 2, decomps, 1, rng), Error);
  std::vector<DoubleLayerTensor> odd(sites.begin(), sites.begin() + 2);
  CHECK_THROWS_AS(positive_sum_estimate(odd, 1, 2, decomps, 100, rng), Error);
}

TEST_CASE("single plaquette value equals the dense trace formula") {
  // 2x2 lattice with one interior face: the face value of the chosen
  // factors must match tr[(sa (x) sd)(sb (x) sc)]-style dense contraction
  // computed through the full network value with single-term decompositions
  const std::int64_t D = 2, rows = 2, cols = 2;
  PepsSpec spec{D, 4096, 55};
  auto sites = sample_double_layer_sites(spec, rows, cols);
  std::vector<SeparableDecomposition> decomps;
  for (std::int64_t idx = 0; idx < 4; ++idx) {
    Grouping g = site_grouping(idx / cols, idx % cols);
    DenseTensor rho = rho_from_grouping(sites[idx], g);
    auto res = separable_decompose(rho, rho.dim(0) == 16 ? 4 : 2,
                                   rho.dim(0) == 16 ? 4 : 2);
    // 2x2 corner sites have pair dims (2, 2)
    REQUIRE(std::holds_alternative<SeparableDecomposition>(res));
    auto dec = std::get<SeparableDecomposition>(res);
    dec.grouping = g;
    decomps.push_back(std::move(dec));
  }
  // full sum over all tuples equals the exact norm (tiny term counts here)
  double total = 0.0;
  std::array<std::size_t, 4> idx{0, 0, 0, 0};
  std::function<void(int, double)> recurse = [&](int s, double weight) {
    if (s == 4) {
      // evaluate the product of face values through the estimator with a
      // deterministic single choice: emulate by one-term decompositions
      std::vector<SeparableDecomposition> single(4);
      for (int i = 0; i < 4; ++i) {
        single[i].grouping = decomps[i].grouping;
        single[i].terms.push_back(decomps[i].terms[idx[i]]);
      }
      Rng rng(1);
      PositiveSumTerms t = positive_sum_estimate(sites, 2, 2, single, 2, rng);
      total += weight * t.estimate.mean.real() /
               (single[0].terms[0].p * single[1].terms[0].p * single[2].terms[0].p *
                single[3].terms[0].p);
      return;
    }
    for (idx[s] = 0; idx[s] < decomps[s].terms.size(); ++idx[s])
      recurse(s + 1, weight * decomps[s].terms[idx[s]].p);
  };
  recurse(0, 1.0);
  LatticeNetwork net = sample_peps_norm_network(spec, 2, 2, false);
  double exact = transfer_value(net).value.real();
  CHECK(total == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("gauge objective and invariance") {
  Rng rng(4);
  PepsSpec spec{2, 2, 77};
  DoubleLayerTensor dl = double_layer(make_peps_tensor(spec, rng));
  DenseTensor site = dl.a;

  // identity gauges leave the tensor and objective unchanged
  DenseTensor id = DenseTensor::identity(4, Field::Complex);
  DenseTensor same = apply_gauge_to_tensor(site, id, id);
  CHECK(oracles::rel_diff(same, site) < 1e-13);

  GaugeResult res = gauge_optimize(site, GaugeMode::Positivity, 60, rng, 0.08);
  // monotone trace
  for (std::size_t i = 1; i < res.gauge.objective_trace.size(); ++i)
    CHECK(res.gauge.objective_trace[i] >= res.gauge.objective_trace[i - 1]);
  CHECK(res.gauge.objective_trace.back() >=
        gauge_objective(site, GaugeMode::Positivity));

  // value invariance on a closed uniform network
  LatticeNetwork net = uniform_network(site, 3, 3, false);
  ContractionValue v0 = transfer_value(net);
  ContractionValue v1 = transfer_value(with_gauge_pairs(net, res.gauge.X, res.gauge.Y));
  CHECK(relative_deviation(v1, v0) < 1e-8);
}

TEST_CASE("hermiticity and both modes improve their objectives") {
  Rng rng(9);
  PepsSpec spec{2, 3, 31};
  DenseTensor site = double_layer(make_peps_tensor(spec, rng)).a;
  // scramble so there is something to recover
  DenseTensor sx = DenseTensor::identity(4, Field::Real);
  for (auto& x : sx.rdata()) x += 0.4 * rng.normal();
  site = apply_gauge_to_tensor(site, sx, sx);
  for (GaugeMode mode : {GaugeMode::Hermiticity, GaugeMode::Both}) {
    double before = gauge_objective(site, mode);
    GaugeResult res = gauge_optimize(site, mode, 120, rng, 0.08);
    CHECK(res.gauge.objective_trace.back() >= before);
  }
  CHECK_THROWS_AS(gauge_optimize(site, GaugeMode::Both, 0, rng), Error);
}
