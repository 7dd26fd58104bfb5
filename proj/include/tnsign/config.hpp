#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tnsign/ensembles.hpp"
#include "tnsign/statmech.hpp"

namespace tnsign {

enum class ExperimentKind {
  DeltaF,
  EntropyScan,
  Interpolation,
  Statmech,
  PhaseScan,
  PepsEntropy,
  PositiveSum,
  GaugeOpt,
  OracleSuite,
};

const char* experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& s);

// One config drives every experiment family; unused grids keep defaults.
// JSON file keys match the field names; CLI flags override file values.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::OracleSuite;
  EnsembleKind kind = EnsembleKind::HaarOrthogonal;
  TargetKind target = TargetKind::AllOnes;
  StatmechKind model = StatmechKind::Orthogonal10;

  std::vector<std::int64_t> D{2};
  std::vector<double> lambda{};
  std::vector<double> mu{};
  std::vector<std::int64_t> W{4};
  std::vector<std::int64_t> d{2};

  std::int64_t trials = 10;
  std::int64_t K = 10000;        // Monte Carlo samples
  std::int64_t chi = 0;          // 0 = auto
  double rel_tol = 1e-12;
  std::int64_t L = 400;          // cylinder length
  std::int64_t burn_in = 20;
  std::int64_t iters = 200;      // gauge optimization iterations
  std::int64_t H = 0;            // statmech lattice length (0 = 4W)
  std::int64_t rows = 4, cols = 4;  // positive-sum lattice
  double gauge_shift = 0.05;     // all-ones admixture for gauge instances
  std::string gauge_mode = "positivity";

  std::uint64_t master_seed = 1;
  std::string out_path = "out.csv";
  int workers = 1;
};

// Parse a JSON config file; missing keys keep their defaults.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig config_from_file(const std::string& path);

// Validate ranges and the exact-contraction guards; throws Errc::config
// with a message naming the offending field.
void validate_config(const ExperimentConfig& cfg);

}  // namespace tnsign
