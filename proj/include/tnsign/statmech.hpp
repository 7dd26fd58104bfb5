#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tnsign/errors.hpp"

namespace tnsign {

enum class StatmechKind { Orthogonal10, Unitary7, Rank1Link, S4Peps };

const char* statmech_kind_name(StatmechKind k);
StatmechKind statmech_kind_from_name(const std::string& s);

// Disorder-averaged q-state spin model on the block lattice. The vertex
// models (orthogonal, unitary, S4) carry on-site weights V and a symmetric
// link weight matrix; the rank-1 interpolation model has Ising variables on
// the links and a vertex Gibbs tensor T(i,j,k,l) = w(i+j+k+l).
struct StatmechModel {
  StatmechKind kind = StatmechKind::Orthogonal10;
  std::int64_t D = 2;
  double lambda = 0.0;   // shift (orthogonal/unitary/rank1)
  std::int64_t phys_d = 1;  // S4 model only
  std::int64_t q = 0;
  std::vector<double> onsite;        // V, length q (vertex models)
  std::vector<double> link;          // q x q row-major (vertex models)
  std::vector<std::string> state_labels;
  // Vertex models: named boundary states as basis indices.
  std::map<std::string, std::int64_t> boundary_index;
  // Rank-1 link model: vertex weights w(0..4) and boundary 2-vectors.
  std::vector<double> vertex_w;
  std::map<std::string, std::vector<double>> boundary_vector;

  bool is_link_model() const { return kind == StatmechKind::Rank1Link; }
  std::vector<double> boundary_weights(const std::string& name) const;
};

// Appendix A: 10-state model of the shifted Haar-orthogonal average.
// Basis order (1); (12),(34),(13),(24),(14),(23); (12)(34),(13)(24),(14)(23).
// V = (mu^4; mu^2 x6; D^4/(D^4+2) x3) with mu = lambda*D, Wlink = D^{-k/2}.
StatmechModel build_orthogonal_model(std::int64_t D, double lambda);

// Appendix B: 7-state model of the shifted Haar-unitary average.
// Basis (1); (12),(34),(14),(23); (12)(34),(14)(23);
// V = (mu^4; mu^2 x4; D^4/(D^4+1) x2).
StatmechModel build_unitary_model(std::int64_t D, double lambda);

// Appendix C: rank-1 interpolation model with Ising link variables; the
// vertex tensor is the unitary model's vertex contracted with four
// Wtilde_Y * R factors (R the positive square root of the link matrix Y),
// divided by D^4. Boundary states are R applied to the Ising basis vectors.
StatmechModel build_rank1_link_model(std::int64_t D, double lambda);

// Section V.A: S4 permutation model of the double-layer PEPS average,
// e^{-h(pi)} = d^{c(pi)}, e^{-k(pi1,pi2)} = D^{c(pi1 pi2^-1)}.
StatmechModel build_s4_model(std::int64_t D, std::int64_t d);

struct TwistedRatio {
  std::int64_t W = 0, H = 0;
  double log_Z_twisted = 0.0;
  double log_Z_uniform = 0.0;
  double predicted_s2 = 0.0;  // -(log_Z_twisted - log_Z_uniform)
};

// Twisted-boundary ratio on a W x H lattice: the fixed boundary column
// couples to the right edge through the link weight, bc_bottom on rows
// < H/2 and bc_top on the rest; the uniform normalizer uses bc_top
// everywhere. Other boundaries are free. Guard: q^W <= 2e5.
TwistedRatio predicted_entropy(const StatmechModel& model, std::int64_t W, std::int64_t H,
                               const std::string& bc_top, const std::string& bc_bottom);

struct PhasePoint {
  StatmechKind kind;
  std::int64_t D;
  double mu;
  double line_tension;  // least-squares slope of predicted_s2 vs W
  std::vector<std::int64_t> Ws;
  std::vector<double> s2_by_W;
};

std::vector<PhasePoint> phase_scan(StatmechKind kind, const std::vector<std::int64_t>& Ds,
                                   const std::vector<double>& mus,
                                   const std::vector<std::int64_t>& Ws,
                                   std::int64_t h_factor = 4);

}  // namespace tnsign
