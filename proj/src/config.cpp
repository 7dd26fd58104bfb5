#include "tnsign/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tnsign/peps.hpp"

namespace tnsign {

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::DeltaF: return "deltaf";
    case ExperimentKind::EntropyScan: return "entropy";
    case ExperimentKind::Interpolation: return "interp";
    case ExperimentKind::Statmech: return "statmech";
    case ExperimentKind::PhaseScan: return "phase";
    case ExperimentKind::PepsEntropy: return "peps";
    case ExperimentKind::PositiveSum: return "possum";
    case ExperimentKind::GaugeOpt: return "gauge";
    case ExperimentKind::OracleSuite: return "oracle";
  }
  return "?";
}

ExperimentKind experiment_kind_from_name(const std::string& s) {
  if (s == "deltaf") return ExperimentKind::DeltaF;
  if (s == "entropy") return ExperimentKind::EntropyScan;
  if (s == "interp") return ExperimentKind::Interpolation;
  if (s == "statmech") return ExperimentKind::Statmech;
  if (s == "phase") return ExperimentKind::PhaseScan;
  if (s == "peps") return ExperimentKind::PepsEntropy;
  if (s == "possum") return ExperimentKind::PositiveSum;
  if (s == "gauge") return ExperimentKind::GaugeOpt;
  if (s == "oracle") return ExperimentKind::OracleSuite;
  fail(Errc::config, "unknown experiment: " + s);
}

namespace {

template <typename T>
void read_list(const nlohmann::json& j, const char* key, std::vector<T>& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  out.clear();
  if (v.is_array())
    for (const auto& x : v) out.push_back(x.get<T>());
  else
    out.push_back(v.get<T>());
}

template <typename T>
void read_scalar(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::config, std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("experiment"))
      cfg.experiment = experiment_kind_from_name(j.at("experiment").get<std::string>());
    if (j.contains("kind"))
      cfg.kind = ensemble_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("target"))
      cfg.target = target_kind_from_name(j.at("target").get<std::string>());
    if (j.contains("model"))
      cfg.model = statmech_kind_from_name(j.at("model").get<std::string>());
    read_list(j, "D", cfg.D);
    read_list(j, "lambda", cfg.lambda);
    read_list(j, "mu", cfg.mu);
    read_list(j, "W", cfg.W);
    read_list(j, "d", cfg.d);
    read_scalar(j, "trials", cfg.trials);
    read_scalar(j, "K", cfg.K);
    read_scalar(j, "chi", cfg.chi);
    read_scalar(j, "rel_tol", cfg.rel_tol);
    read_scalar(j, "L", cfg.L);
    read_scalar(j, "burn_in", cfg.burn_in);
    read_scalar(j, "iters", cfg.iters);
    read_scalar(j, "H", cfg.H);
    read_scalar(j, "rows", cfg.rows);
    read_scalar(j, "cols", cfg.cols);
    read_scalar(j, "gauge_shift", cfg.gauge_shift);
    read_scalar(j, "gauge_mode", cfg.gauge_mode);
    read_scalar(j, "seed", cfg.master_seed);
    read_scalar(j, "out", cfg.out_path);
    read_scalar(j, "workers", cfg.workers);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config, std::string("config field error: ") + e.what());
  }
  return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
  auto bad = [](const std::string& field, const std::string& why) {
    fail(Errc::config, "invalid config field '" + field + "': " + why);
  };
  if (cfg.D.empty()) bad("D", "grid must be nonempty");
  for (auto D : cfg.D)
    if (D < 1) bad("D", "bond dimension must be >= 1");
  if (cfg.W.empty()) bad("W", "grid must be nonempty");
  for (auto W : cfg.W)
    if (W < 1) bad("W", "width must be >= 1");
  for (double l : cfg.lambda)
    if (l < 0) bad("lambda", "shift must be >= 0");
  for (double m : cfg.mu)
    if (m < 0) bad("mu", "bias must be >= 0");
  if (cfg.trials < 1) bad("trials", "must be >= 1");
  if (cfg.workers < 1) bad("workers", "must be >= 1");
  if (cfg.rel_tol < 0) bad("rel_tol", "must be >= 0");
  if (cfg.out_path.empty()) bad("out", "output path must be set");

  switch (cfg.experiment) {
    case ExperimentKind::DeltaF: {
      if (cfg.lambda.empty()) bad("lambda", "delta-f needs a lambda grid");
      if (cfg.L - cfg.burn_in < 50)
        bad("L", "delta-f experiments need L - burn_in >= 50");
      if (cfg.burn_in < 0) bad("burn_in", "must be >= 0");
      for (auto D : cfg.D)
        for (auto W : cfg.W) {
          if (W < 2) bad("W", "cylinder circumference must be >= 2");
          if (W * std::log2(double(D)) > 16.0 + 1e-9)
            bad("W", "exact transfer guard D^W <= 2^16 exceeded");
        }
      break;
    }
    case ExperimentKind::EntropyScan:
    case ExperimentKind::Interpolation: {
      const auto& grid = cfg.experiment == ExperimentKind::EntropyScan ? cfg.mu : cfg.lambda;
      if (grid.empty())
        bad(cfg.experiment == ExperimentKind::EntropyScan ? "mu" : "lambda",
            "entropy scans need a grid");
      for (auto W : cfg.W)
        if (W * 4 > 64) bad("W", "block height 4W is unreasonably large");
      if (cfg.chi != 0 && cfg.chi < *std::max_element(cfg.D.begin(), cfg.D.end()))
        bad("chi", "chi must be 0 (auto) or >= max D");
      break;
    }
    case ExperimentKind::Statmech:
    case ExperimentKind::PhaseScan: {
      if (cfg.mu.empty()) bad("mu", "statmech scans need a mu grid");
      std::int64_t q = cfg.model == StatmechKind::Orthogonal10  ? 10
                       : cfg.model == StatmechKind::Unitary7    ? 7
                       : cfg.model == StatmechKind::Rank1Link   ? 2
                                                                : 24;
      for (auto W : cfg.W)
        if (std::pow(double(q), double(W)) > 2e5)
          bad("W", "statmech transfer guard q^W <= 2e5 exceeded");
      if (cfg.experiment == ExperimentKind::PhaseScan && cfg.W.size() < 2)
        bad("W", "phase scan needs at least two widths");
      for (auto D : cfg.D)
        if (D < 2) bad("D", "statmech models need D >= 2");
      break;
    }
    case ExperimentKind::PepsEntropy: {
      if (cfg.d.empty()) bad("d", "peps entropy needs a physical-dimension grid");
      for (auto dd : cfg.d)
        if (dd < 1) bad("d", "physical dimension must be >= 1");
      break;
    }
    case ExperimentKind::PositiveSum: {
      if (cfg.d.empty()) bad("d", "positive-sum needs a physical-dimension grid");
      if (cfg.rows % 2 != 0 || cfg.cols % 2 != 0 || cfg.rows < 2 || cfg.cols < 2)
        bad("rows", "positive-sum lattice must be even x even");
      if (cfg.K < 2) bad("K", "need at least 2 samples");
      for (auto D : cfg.D)
        if (cfg.rows * std::log2(double(D) * double(D)) > 20.0 + 1e-9)
          bad("rows", "exact norm transfer guard exceeded");
      break;
    }
    case ExperimentKind::GaugeOpt: {
      if (cfg.iters < 1) bad("iters", "must be >= 1");
      if (cfg.gauge_shift < 0) bad("gauge_shift", "must be >= 0");
      gauge_mode_from_name(cfg.gauge_mode);  // throws on bad name
      break;
    }
    case ExperimentKind::OracleSuite: {
      for (auto D : cfg.D)
        if (12.0 * std::log2(double(D)) > 24.0 + 1e-9)
          bad("D", "brute-force guard D^{#edges} <= 2^24 exceeded on 3x3");
      break;
    }
  }
}

}  // namespace tnsign
