#pragma once

#include <cstdint>
#include <string>

#include "tnsign/dense_tensor.hpp"
#include "tnsign/rng.hpp"

namespace tnsign {

enum class EnsembleKind { HaarOrthogonal, HaarUnitary, GaussianReal, GaussianComplex };

enum class TargetKind { AllOnes, Rank1Signed, Rank1Haar, PositiveRandom };

const char* ensemble_kind_name(EnsembleKind k);
EnsembleKind ensemble_kind_from_name(const std::string& s);
const char* target_kind_name(TargetKind k);
TargetKind target_kind_from_name(const std::string& s);
bool ensemble_is_complex(EnsembleKind k);

struct InterpolationTarget {
  TargetKind kind = TargetKind::AllOnes;
  // Stream for the site-fixed PositiveRandom tensor (same tensor at every site).
  std::uint64_t seed = 0;
};

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::HaarOrthogonal;
  std::int64_t bond_dim = 2;
  double shift = 0.0;  // lambda
  InterpolationTarget target;
  std::uint64_t seed = 0;
};

// Which of the four lattice legs a site keeps; legs point off-lattice are
// dropped rather than padded. Leg order in tensors is always (l, r, u, d)
// restricted to the present ones.
struct LegMask {
  bool left = false, right = false, up = false, down = false;
  int count() const { return int(left) + int(right) + int(up) + int(down); }
};

// Unit-norm Haar vector, sampled as a normalized i.i.d. Gaussian vector.
DenseTensor sample_haar_vector(std::int64_t n, Field field, Rng& rng);

// The interpolation tensor S for one site with the given legs. Entries have
// typical magnitude 1 in all variants (Rank1Haar leg vectors carry sqrt(D)).
DenseTensor target_tensor(const EnsembleSpec& spec, const LegMask& legs, Rng& site_rng);

// Site tensor D^{k/2} U + lambda * S for a k-leg site (Gaussian kinds use
// i.i.d. std-1 entries in place of the scaled Haar vector). The random part
// is drawn before any target randomness, so tensors with equal seeds differ
// exactly by (lambda - lambda') * S.
DenseTensor make_site_tensor(const EnsembleSpec& spec, const LegMask& legs, Rng& site_rng);

struct PepsSpec {
  std::int64_t bond_dim = 2;  // D
  std::int64_t phys_dim = 2;  // d
  std::uint64_t seed = 0;
};

// Haar-random PEPS tensor: unit-norm vector reshaped to (d, D, D, D, D).
DenseTensor make_peps_tensor(const PepsSpec& spec, Rng& rng);
// Boundary variant with trimmed virtual legs, shape (d, D^k legs).
DenseTensor make_peps_site_tensor(const PepsSpec& spec, const LegMask& legs, Rng& rng);

}  // namespace tnsign
