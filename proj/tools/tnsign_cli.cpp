// Command-line front end for the tnsign shared library. Each subcommand
// assembles a config JSON (file values overridden by flags) and hands it to
// tnsign_run_experiment through the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tnsign.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;

  std::vector<std::int64_t> D, W, d;
  std::vector<double> lambda, mu;
  std::string kind, target, model, gauge_mode;
  std::int64_t trials = -1, K = -1, chi = -1, L = -1, burn_in = -1, iters = -1;
  std::int64_t rows = -1, cols = -1;
  double rel_tol = -1.0, gauge_shift = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out_path, "output CSV path");
  cmd->add_option("--seed", o.seed, "master seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--workers", o.workers, "worker thread count");
  cmd->add_option("--D", o.D, "bond dimension grid")->delimiter(',');
  cmd->add_option("--W", o.W, "width / circumference grid")->delimiter(',');
  cmd->add_option("--d", o.d, "physical dimension grid")->delimiter(',');
  cmd->add_option("--lambda", o.lambda, "shift grid")->delimiter(',');
  cmd->add_option("--mu", o.mu, "bias (lambda*D) grid")->delimiter(',');
  cmd->add_option("--kind", o.kind, "ensemble kind");
  cmd->add_option("--target", o.target, "interpolation target");
  cmd->add_option("--model", o.model, "statmech model");
  cmd->add_option("--mode", o.gauge_mode, "gauge objective mode");
  cmd->add_option("--trials", o.trials, "trials / realizations per grid point");
  cmd->add_option("--K", o.K, "Monte Carlo samples");
  cmd->add_option("--chi", o.chi, "boundary MPS bond cap (0 = auto)");
  cmd->add_option("--L", o.L, "cylinder length");
  cmd->add_option("--burn-in", o.burn_in, "discarded slices");
  cmd->add_option("--iters", o.iters, "gauge optimization iterations");
  cmd->add_option("--rows", o.rows, "positive-sum lattice rows");
  cmd->add_option("--cols", o.cols, "positive-sum lattice cols");
  cmd->add_option("--rel-tol", o.rel_tol, "SVD truncation tolerance");
  cmd->add_option("--gauge-shift", o.gauge_shift, "all-ones admixture for gauge tensors");
}

// Assemble the config JSON by hand: file contents first, flags override.
std::string build_config(const std::string& experiment, const CommonOpts& o) {
  std::ostringstream js;
  std::string file_body;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in.good()) throw CLI::ValidationError("--config", "cannot open " + o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    file_body = ss.str();
    // strip the outer braces so overrides can be appended
    auto l = file_body.find('{');
    auto r = file_body.rfind('}');
    if (l == std::string::npos || r == std::string::npos || r <= l)
      throw CLI::ValidationError("--config", "config must be a JSON object");
    file_body = file_body.substr(l + 1, r - l - 1);
    // drop trailing whitespace/commas
    while (!file_body.empty() &&
           (std::isspace(static_cast<unsigned char>(file_body.back())) ||
            file_body.back() == ','))
      file_body.pop_back();
  }
  js << "{";
  if (!file_body.empty()) js << file_body << ",";
  js << "\"experiment\":\"" << experiment << "\"";
  auto emit_list_i = [&](const char* key, const std::vector<std::int64_t>& v) {
    if (v.empty()) return;
    js << ",\"" << key << "\":[";
    for (std::size_t i = 0; i < v.size(); ++i) js << (i ? "," : "") << v[i];
    js << "]";
  };
  auto emit_list_d = [&](const char* key, const std::vector<double>& v) {
    if (v.empty()) return;
    js << ",\"" << key << "\":[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
      js << (i ? "," : "") << buf;
    }
    js << "]";
  };
  emit_list_i("D", o.D);
  emit_list_i("W", o.W);
  emit_list_i("d", o.d);
  emit_list_d("lambda", o.lambda);
  emit_list_d("mu", o.mu);
  if (!o.kind.empty()) js << ",\"kind\":\"" << o.kind << "\"";
  if (!o.target.empty()) js << ",\"target\":\"" << o.target << "\"";
  if (!o.model.empty()) js << ",\"model\":\"" << o.model << "\"";
  if (!o.gauge_mode.empty()) js << ",\"gauge_mode\":\"" << o.gauge_mode << "\"";
  if (o.trials >= 0) js << ",\"trials\":" << o.trials;
  if (o.K >= 0) js << ",\"K\":" << o.K;
  if (o.chi >= 0) js << ",\"chi\":" << o.chi;
  if (o.L >= 0) js << ",\"L\":" << o.L;
  if (o.burn_in >= 0) js << ",\"burn_in\":" << o.burn_in;
  if (o.iters >= 0) js << ",\"iters\":" << o.iters;
  if (o.rows >= 0) js << ",\"rows\":" << o.rows;
  if (o.cols >= 0) js << ",\"cols\":" << o.cols;
  if (o.rel_tol >= 0) js << ",\"rel_tol\":" << o.rel_tol;
  if (o.gauge_shift >= 0) js << ",\"gauge_shift\":" << o.gauge_shift;
  if (o.seed_set) js << ",\"seed\":" << o.seed;
  if (o.workers > 0) js << ",\"workers\":" << o.workers;
  if (!o.out_path.empty()) js << ",\"out\":\"" << o.out_path << "\"";
  js << "}";
  return js.str();
}

int run(const std::string& experiment, const CommonOpts& o) {
  std::string cfg = build_config(experiment, o);
  tnsign_status s = tnsign_validate_config(cfg.c_str());
  if (s != TNSIGN_OK) {
    std::fprintf(stderr, "config error (%s): %s\n", tnsign_status_name(s),
                 tnsign_last_error());
    return 2;
  }
  int64_t rows = 0;
  s = tnsign_run_experiment(cfg.c_str(), &rows);
  if (s != TNSIGN_OK) {
    std::fprintf(stderr, "experiment failed (%s): %s\n", tnsign_status_name(s),
                 tnsign_last_error());
    return 1;
  }
  std::fprintf(stdout, "wrote %lld rows\n", static_cast<long long>(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tnsign: sign structure and contraction hardness of random tensor networks"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"deltaf", "free-energy difference Delta f on long cylinders"},
      {"entropy", "boundary-MPS entanglement scan over lambda*D"},
      {"interp", "interpolation-target entanglement scan over lambda"},
      {"statmech", "twisted-boundary predictions of the averaged spin models"},
      {"phase", "domain-wall line tensions over a (D, mu) grid"},
      {"peps", "double-layer PEPS boundary entropy experiment"},
      {"possum", "separable decompositions and the positive-sum estimator"},
      {"gauge", "positivity-guided gauge optimization"},
      {"oracle", "brute force vs transfer contraction cross-checks"},
  };
  std::vector<CommonOpts> opts(std::size(subs));
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    add_common(cmd, opts[i]);
    cmds.push_back(cmd);
  }

  CLI::App* plot = app.add_subcommand("plot", "reshape a raw CSV into plot-ready series");
  std::string plot_in, plot_style, plot_out;
  plot->add_option("--in", plot_in, "raw CSV")->required();
  plot->add_option("--style", plot_style, "deltaf|entropy|interp|peps")->required();
  plot->add_option("--out", plot_out, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  if (plot->parsed()) {
    tnsign_status s = tnsign_emit_plot_data(plot_in.c_str(), plot_style.c_str(),
                                            plot_out.c_str());
    if (s != TNSIGN_OK) {
      std::fprintf(stderr, "plot emit failed (%s): %s\n", tnsign_status_name(s),
                   tnsign_last_error());
      return 1;
    }
    return 0;
  }
  for (std::size_t i = 0; i < cmds.size(); ++i)
    if (cmds[i]->parsed()) return run(subs[i].name, opts[i]);
  return 2;
}
