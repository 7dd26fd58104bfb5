#pragma once

#include <cstdint>
#include <vector>

#include "tnsign/lattice.hpp"
#include "tnsign/rng.hpp"

namespace tnsign {

struct McEstimate {
  cx mean;
  double stderr_est = 0.0;
  std::int64_t samples = 0;
};

// Uniform-proposal Monte Carlo estimate of the contraction value:
// mean = D^{#edges} * avg T(x), stderr from the sample std of the rescaled
// terms. No Markov chain; the cancellation structure is exactly what is
// being probed.
McEstimate mc_estimate_value(const LatticeNetwork& net, std::int64_t samples, Rng& rng);

struct DeltaFRecord {
  std::int64_t W = 0, L = 0, burn_in = 0;
  double delta_f = 0.0;
  double stderr_est = 0.0;
  // Per-slice (log abs-network norm ratio - log signed norm ratio) / W.
  std::vector<double> slice_series;
  // Phase of the signed frontier sum after the last slice (tracked, not
  // folded into delta_f).
  cx final_phase{1.0, 0.0};
  std::uint64_t seed = 0;
};

// Free-energy density difference on a long cylinder of circumference W:
// both the signed and the abs-mapped transfers start from the all-ones
// vector, and delta_f is the average per-site difference of the per-slice
// log norm ratios after discarding burn_in slices. Columns are sampled as
// bulk 4-leg tensors from per-site streams derive_seed(spec.seed, {r, c}).
// Guard: D^W <= 2^16. Small L (down to burn_in + 1) is allowed for oracle
// comparisons; experiment configs enforce L - burn_in >= 50.
DeltaFRecord cylinder_delta_f(const EnsembleSpec& spec, std::int64_t W, std::int64_t L,
                              std::int64_t burn_in);

// The cylinder instance cylinder_delta_f(spec, W, L, ...) works through,
// with dangling horizontal end legs (close with ones to enumerate).
LatticeNetwork delta_f_cylinder_network(const EnsembleSpec& spec, std::int64_t W,
                                        std::int64_t L);

}  // namespace tnsign
