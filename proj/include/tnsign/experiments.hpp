#pragma once

#include <string>

#include "tnsign/config.hpp"

namespace tnsign {

struct RunSummary {
  std::string raw_path;
  std::string agg_path;
  std::int64_t rows_written = 0;
};

// Runs the configured experiment and writes the raw CSV plus an aggregated
// CSV (suffix .agg.csv). Deterministic for a fixed (config, master_seed)
// regardless of worker count; rows are written in grid order and a
// "# complete" marker closes finished files.
RunSummary run_experiment(const ExperimentConfig& cfg);

// Reshape a raw CSV into plot-ready (x, y, yerr, series) rows. Styles:
// "deltaf" (x = lambda, series per D), "entropy" (x = lambdaD,
// y = mean s2 / W, series per W), "interp" (x = lambda, series per D),
// "peps" (x = W, series per (D, d)).
void emit_plot_data(const std::string& raw_csv, const std::string& style,
                    const std::string& out_path);

}  // namespace tnsign
