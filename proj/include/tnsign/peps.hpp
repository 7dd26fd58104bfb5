#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "tnsign/boundary_mps.hpp"
#include "tnsign/lattice.hpp"
#include "tnsign/rng.hpp"
#include "tnsign/sign_mc.hpp"

namespace tnsign {

// Double-layer tensor A = sum_i C^i (x) conj(C^i) with composite ket/bra
// legs of dimension D^2 each; PSD as a map from ket to bra indices.
struct DoubleLayerTensor {
  DenseTensor a;          // composite legs, (l, r, u, d) order, dims D^2
  std::int64_t D = 0;     // PEPS bond dimension
  std::int64_t d = 0;     // physical dimension of the source tensor
  LegMask legs{true, true, true, true};
};

DoubleLayerTensor double_layer(const DenseTensor& c);

// The double layer as a matrix M[y, z] = sum_i C^i[y] conj(C^i[z]) over the
// full ket/bra multi-indices; Hermitian PSD with trace |C|^2.
DenseTensor double_layer_as_operator(const DoubleLayerTensor& a);
double double_layer_trace(const DoubleLayerTensor& a);

enum class Grouping { LeftDown_vs_UpRight, RightDown_vs_LeftUp };

// rho_AB: trace-normalized PSD operator with the ket legs regrouped into
// (pair A, pair B); rows = bra, cols = ket multi-index.
DenseTensor rho_from_grouping(const DoubleLayerTensor& a, Grouping g);

struct SeparableTerm {
  double p = 0.0;          // positive weight
  DenseTensor sigma_a;     // PSD, unit trace, acts on the pair-A ket space
  DenseTensor sigma_b;
};

struct SeparableDecomposition {
  std::vector<SeparableTerm> terms;
  Grouping grouping = Grouping::LeftDown_vs_UpRight;
};

struct SeparableFailure {
  // identity coefficient left after padding (negative on failure)
  double offending_coefficient = 0.0;
  double required_mass = 0.0;
  double available_mass = 0.0;
};

// Identity-padding construction: expand rho in a Hermitian product basis
// containing the identity (the basis is adapted to rho through the real SVD
// of its coefficient matrix), then pair every term with part of the
// identity so both factors become PSD. Failure is a value, not an error.
std::variant<SeparableDecomposition, SeparableFailure> separable_decompose(
    const DenseTensor& rho, std::int64_t dim_a, std::int64_t dim_b);

// Frobenius error of sum_i p_i sigma_a (x) sigma_b against rho.
double separable_reconstruction_error(const SeparableDecomposition& dec,
                                      const DenseTensor& rho);

// Per-site machinery of the positive-sum rewriting on an even x even
// lattice: checkerboard groupings (top-left site LeftDown_vs_UpRight) make
// every factor close around one plaquette.
Grouping site_grouping(std::int64_t row, std::int64_t col);

struct PositiveSumTerms {
  McEstimate estimate;
  double min_term = 0.0;       // most negative sampled term (>= -1e-12 expected)
  double average_sign = 0.0;   // fraction-weighted sign of sampled terms
  std::int64_t negative_terms = 0;
};

// Sign-problem-free Monte Carlo estimate of the norm network value from
// per-site separable decompositions. Index tuples are drawn with
// probability proportional to prod p_i; every term is a product of
// plaquette overlaps of PSD operators.
PositiveSumTerms positive_sum_estimate(const std::vector<DoubleLayerTensor>& sites,
                                       std::int64_t rows, std::int64_t cols,
                                       const std::vector<SeparableDecomposition>& decomps,
                                       std::int64_t samples, Rng& rng);

// Per-site double-layer tensors of the closed norm network sampled with the
// same per-site streams as sample_peps_norm_network.
std::vector<DoubleLayerTensor> sample_double_layer_sites(const PepsSpec& spec,
                                                         std::int64_t rows,
                                                         std::int64_t cols);

struct PepsEntropyRow {
  std::int64_t D, d, W, H, trial;
  double s2, trunc_weight;
  std::uint64_t seed;
  std::int64_t wall_ms = 0;
};

struct PepsEntropyFit {
  std::int64_t D, d;
  double slope_vs_w = 0.0;  // fitted slope of mean s2 against W
};

struct PepsEntropyResult {
  std::vector<PepsEntropyRow> rows;
  std::vector<PepsEntropyFit> fits;
  // decay exponent alpha per D: mean s2 ~ d^{-alpha}
  std::vector<std::pair<std::int64_t, double>> alpha_by_D;
};

struct PepsEntropySpec {
  std::vector<std::int64_t> Ds, ds, Ws;
  std::int64_t trials = 10;
  std::int64_t chi = 0;
  double rel_tol = 1e-12;
  std::int64_t h_factor = 4;
  std::uint64_t master_seed = 0;
  std::uint64_t experiment_tag = 6;
  int workers = 1;
};

PepsEntropyResult peps_entropy_experiment(const PepsEntropySpec& spec);

enum class GaugeMode { Positivity, Hermiticity, Both };

const char* gauge_mode_name(GaugeMode m);
GaugeMode gauge_mode_from_name(const std::string& s);

struct GaugePair {
  DenseTensor X, Y;
  std::vector<double> objective_trace;  // non-decreasing, one entry per iteration
  double cond_x = 1.0, cond_y = 1.0;
};

struct GaugeResult {
  GaugePair gauge;
  DenseTensor transformed;
};

// Positivity objective |sum A| / sum |A| on the transformed tensor;
// Hermiticity penalizes the anti-Hermitian fraction of the vertical-traced
// transfer matrix; Both combines them with weight 0.5 on the penalty.
double gauge_objective(const DenseTensor& t, GaugeMode mode);
DenseTensor apply_gauge_to_tensor(const DenseTensor& t, const DenseTensor& X,
                                  const DenseTensor& Y);

// Randomized coordinate ascent over (X, Y); steps that would make a gauge
// singular (condition number > 1e6) are rejected, so the objective trace is
// non-decreasing by construction.
GaugeResult gauge_optimize(const DenseTensor& site, GaugeMode mode, std::int64_t iters,
                           Rng& rng, double step = 0.05);

}  // namespace tnsign
