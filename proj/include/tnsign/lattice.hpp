#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tnsign/dense_tensor.hpp"
#include "tnsign/ensembles.hpp"

namespace tnsign {

enum class Geometry { OpenRect, CylinderRows };

const char* geometry_name(Geometry g);
Geometry geometry_from_name(const std::string& s);

// Rectangular grid of rank-<=4 tensors with matched bond dimensions.
// CylinderRows identifies the top and bottom row legs (periodic vertically).
// Tensors are stored row-major with legs in (l, r, u, d) order restricted to
// the present legs of their mask.
struct LatticeNetwork {
  Geometry geometry = Geometry::OpenRect;
  std::int64_t rows = 0, cols = 0;
  std::int64_t bond_dim = 0;
  std::vector<DenseTensor> tensors;  // row-major
  std::vector<LegMask> masks;
  // Right legs of the last column dangle (the block state's open legs).
  bool open_right_edge = false;

  const DenseTensor& site(std::int64_t r, std::int64_t c) const {
    return tensors[static_cast<std::size_t>(r * cols + c)];
  }
  DenseTensor& site(std::int64_t r, std::int64_t c) {
    return tensors[static_cast<std::size_t>(r * cols + c)];
  }
  const LegMask& mask(std::int64_t r, std::int64_t c) const {
    return masks[static_cast<std::size_t>(r * cols + c)];
  }
  bool has_open_legs() const;
  std::int64_t edge_count() const;
  void validate() const;
};

struct NetworkOptions {
  bool open_right_edge = false;
  // Sample every column with bulk (4-leg) tensors; the horizontal end legs
  // dangle. Used by the delta-f cylinders, closed with all-ones in oracles.
  bool all_bulk_columns = false;
};

// Per-site streams are derived as derive_seed(spec.seed, {row, col}), so a
// network is reproducible site-by-site and trials parallelize.
LatticeNetwork sample_network(const EnsembleSpec& spec, Geometry geometry,
                              std::int64_t rows, std::int64_t cols,
                              const NetworkOptions& opts = {});

// Double-layer PEPS norm network with composite bond dimension D^2.
LatticeNetwork sample_peps_norm_network(const PepsSpec& spec, std::int64_t rows,
                                        std::int64_t cols, bool open_right_edge);

// Translation-invariant network from one bulk 4-leg tensor; boundary legs
// that point off-lattice are closed with all-ones vectors.
LatticeNetwork uniform_network(const DenseTensor& bulk, std::int64_t rows,
                               std::int64_t cols, bool open_right_edge = false);

LatticeNetwork abs_network(const LatticeNetwork& net);
LatticeNetwork transposed(const LatticeNetwork& net);
LatticeNetwork close_open_legs_with_ones(const LatticeNetwork& net);

// Insert G, G^-1 across every interior edge (X on horizontal, Y on vertical
// edges); the contraction value is unchanged.
LatticeNetwork with_gauge_pairs(const LatticeNetwork& net, const DenseTensor& X,
                                const DenseTensor& Y);

struct ContractionValue {
  cx value;             // sign_or_phase * exp(log_magnitude), when representable
  double log_magnitude; // -inf for an exactly zero contraction
  cx sign_or_phase;     // unit modulus (1 for zero contractions)
};

ContractionValue make_contraction_value(cx unscaled, double log_accum);
// |a - b| / |b| with the log-scaled representation.
double relative_deviation(const ContractionValue& a, const ContractionValue& b);

// Exact configuration sum over all edge assignments.
// Guard: D^{#edges} <= 2^24.
ContractionValue brute_force_value(const LatticeNetwork& net);

// Exact column-by-column transfer contraction with per-column rescaling
// accumulated in log_magnitude. Guard: D^rows <= 2^20.
ContractionValue transfer_value(const LatticeNetwork& net);

std::string network_to_json(const LatticeNetwork& net);
LatticeNetwork network_from_json(const std::string& text);

}  // namespace tnsign
