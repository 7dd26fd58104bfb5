#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tnsign/lattice.hpp"

namespace tnsign {

// Matrix-product representation of a contracted block state psi. Site
// tensors are (left bond, physical, right bond); the overall norm is kept
// factored out in log_scale to avoid under/overflow on large blocks.
struct BoundaryMps {
  std::vector<DenseTensor> sites;
  std::int64_t chi_max = 0;
  double cumulative_truncation = 0.0;  // sum of relative discarded weights
  double log_scale = 0.0;
  std::optional<std::int64_t> canonical_center;

  std::int64_t length() const { return static_cast<std::int64_t>(sites.size()); }
  std::int64_t bond_dim_at(std::int64_t bond) const;  // bond between sites b-1, b
  std::int64_t max_bond_dim() const;
};

struct BlockSpec {
  std::int64_t W = 1;
  std::int64_t H = 0;    // 0 -> 4*W
  std::int64_t cut = 0;  // 0 -> H/2
  EnsembleSpec ensemble;
};

// Boundary state of a W-column block with H open right-edge legs, built by
// absorbing columns left to right with svd_split truncation at chi.
// chi <= 0 selects the default min(D^W, 256); explicit chi must be >= D.
BoundaryMps block_boundary_state(const BlockSpec& spec, std::int64_t chi, double rel_tol);

// Same construction for an already-sampled block network (open right edge).
BoundaryMps boundary_mps_of_block(const LatticeNetwork& block, std::int64_t chi,
                                  double rel_tol);

// Normalized Schmidt spectra at every bond b = 1..H-1.
std::vector<std::vector<double>> schmidt_spectra(const BoundaryMps& psi);

struct EntropyRecord {
  double s2 = 0.0;  // nats
  std::vector<double> schmidt_spectrum;
  double alpha = 2.0;
};

// Renyi entropy across the given bond; alpha = 1 is the von Neumann limit.
EntropyRecord renyi_entropy(const BoundaryMps& psi, std::int64_t cut, double alpha = 2.0);
double renyi_from_spectrum(const std::vector<double>& probs, double alpha);

// Dense reconstruction over the H open legs (test-scale blocks only).
DenseTensor mps_to_dense(const BoundaryMps& psi);

struct EntropyScanSpec {
  EnsembleKind kind = EnsembleKind::HaarOrthogonal;
  TargetKind target = TargetKind::AllOnes;
  std::vector<std::int64_t> Ds;
  std::vector<double> grid;      // lambda*D values, or raw lambda
  bool grid_is_lambda_d = true;
  std::vector<std::int64_t> Ws;
  std::int64_t trials = 10;
  std::int64_t chi = 0;  // 0 = auto
  double rel_tol = 1e-12;
  std::int64_t h_factor = 4;
  // Paired chi vs 2*chi comparison on this many trials (0 = only where the
  // cap binds; the check is skipped when chi >= D^W since the MPS is exact).
  std::int64_t conv_check_trials = 12;
  double conv_band = 0.02;
  std::uint64_t master_seed = 0;
  std::uint64_t experiment_tag = 1;
  int workers = 1;
};

struct EntropyScanRow {
  EnsembleKind kind;
  TargetKind target;
  std::int64_t D;
  double lambda, lambda_d;
  std::int64_t W, H, chi, trial;
  double s2, trunc_weight;
  std::uint64_t seed;
  std::int64_t wall_ms = 0;
};

struct EntropyScanPoint {
  std::int64_t D;
  double lambda, lambda_d;
  std::int64_t W, H, chi, n;
  double mean_s2, std_s2, stderr_s2;
  bool converged;
  double conv_shift;
};

struct EntropyScanResult {
  std::vector<EntropyScanRow> rows;
  std::vector<EntropyScanPoint> points;
};

EntropyScanResult entropy_scan(const EntropyScanSpec& spec);

// First grid value where the curve drops to half its value at the first
// grid point, by linear interpolation; NaN when it never crosses.
double half_value_crossover(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace tnsign
