#include "tnsign/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "tnsign/linalg.hpp"

#include "tnsign/boundary_mps.hpp"
#include "tnsign/csv.hpp"
#include "tnsign/peps.hpp"
#include "tnsign/sign_mc.hpp"
#include "tnsign/task_pool.hpp"

namespace tnsign {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

std::string agg_path_for(const std::string& raw) { return raw + ".agg.csv"; }

struct Stats {
  std::int64_t n = 0;
  double mean = 0.0, stddev = 0.0, stderr_est = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  s.n = static_cast<std::int64_t>(xs.size());
  if (s.n == 0) return s;
  double sum = std::accumulate(xs.begin(), xs.end(), 0.0);
  s.mean = sum / double(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / double(s.n - 1));
    s.stderr_est = s.stddev / std::sqrt(double(s.n));
  }
  return s;
}

std::uint64_t experiment_tag(const ExperimentConfig& cfg) {
  return 100 + static_cast<std::uint64_t>(cfg.experiment);
}

RunSummary run_deltaf(const ExperimentConfig& cfg) {
  struct Task {
    std::int64_t D, W, trial;
    double lambda;
    std::uint64_t seed;
    DeltaFRecord rec;
    std::int64_t wall = 0;
  };
  std::vector<Task> tasks;
  for (auto D : cfg.D)
    for (double lam : cfg.lambda)
      for (auto W : cfg.W) {
        std::uint64_t point = derive_seed(
            cfg.master_seed, {experiment_tag(cfg), static_cast<std::uint64_t>(D),
                              bits(lam), static_cast<std::uint64_t>(W)});
        for (std::int64_t t = 0; t < cfg.trials; ++t)
          tasks.push_back({D, W, t, lam,
                           derive_seed(point, {static_cast<std::uint64_t>(t)}),
                           {},
                           0});
      }
  TaskPool pool(cfg.workers);
  for (auto& task : tasks)
    pool.submit([&cfg, &task] {
      auto t0 = Clock::now();
      EnsembleSpec spec;
      spec.kind = cfg.kind;
      spec.bond_dim = task.D;
      spec.shift = task.lambda;
      spec.seed = task.seed;
      task.rec = cylinder_delta_f(spec, task.W, cfg.L, cfg.burn_in);
      task.wall = ms_since(t0);
    });
  pool.wait();

  CsvWriter raw(cfg.out_path,
                {"experiment", "kind", "D", "lambda", "W", "L", "burn_in", "delta_f",
                 "delta_f_stderr", "seed", "wall_time_ms"});
  for (const auto& t : tasks)
    raw.write_row({experiment_kind_name(cfg.experiment), ensemble_kind_name(cfg.kind),
                   CsvWriter::num(t.D), CsvWriter::num(t.lambda), CsvWriter::num(t.W),
                   CsvWriter::num(cfg.L), CsvWriter::num(cfg.burn_in),
                   CsvWriter::num(t.rec.delta_f), CsvWriter::num(t.rec.stderr_est),
                   CsvWriter::num(t.seed), CsvWriter::num(t.wall)});
  raw.finish();

  CsvWriter agg(agg_path_for(cfg.out_path),
                {"experiment", "kind", "D", "lambda", "W", "n", "mean_delta_f",
                 "std_delta_f", "stderr_delta_f"});
  for (auto D : cfg.D)
    for (double lam : cfg.lambda)
      for (auto W : cfg.W) {
        std::vector<double> xs;
        for (const auto& t : tasks)
          if (t.D == D && t.lambda == lam && t.W == W) xs.push_back(t.rec.delta_f);
        Stats s = stats_of(xs);
        agg.write_row({experiment_kind_name(cfg.experiment), ensemble_kind_name(cfg.kind),
                       CsvWriter::num(D), CsvWriter::num(lam), CsvWriter::num(W),
                       CsvWriter::num(s.n), CsvWriter::num(s.mean), CsvWriter::num(s.stddev),
                       CsvWriter::num(s.stderr_est)});
      }
  agg.finish();
  return {cfg.out_path, agg_path_for(cfg.out_path),
          static_cast<std::int64_t>(tasks.size())};
}

RunSummary run_entropy(const ExperimentConfig& cfg) {
  const bool interp = cfg.experiment == ExperimentKind::Interpolation;
  EntropyScanSpec spec;
  spec.kind = cfg.kind;
  spec.target = cfg.target;
  spec.Ds = cfg.D;
  spec.grid = interp ? cfg.lambda : cfg.mu;
  spec.grid_is_lambda_d = !interp;
  spec.Ws = cfg.W;
  spec.trials = cfg.trials;
  spec.chi = cfg.chi;
  spec.rel_tol = cfg.rel_tol;
  spec.master_seed = cfg.master_seed;
  spec.experiment_tag = experiment_tag(cfg);
  spec.workers = cfg.workers;
  EntropyScanResult res = entropy_scan(spec);

  CsvWriter raw(cfg.out_path,
                {"experiment", "kind", "target", "D", "lambda", "lambdaD", "W", "H", "chi",
                 "trial", "s2", "trunc_weight", "seed", "wall_time_ms"});
  for (const auto& r : res.rows)
    raw.write_row({experiment_kind_name(cfg.experiment), ensemble_kind_name(r.kind),
                   target_kind_name(r.target), CsvWriter::num(r.D), CsvWriter::num(r.lambda),
                   CsvWriter::num(r.lambda_d), CsvWriter::num(r.W), CsvWriter::num(r.H),
                   CsvWriter::num(r.chi), CsvWriter::num(r.trial), CsvWriter::num(r.s2),
                   CsvWriter::num(r.trunc_weight), CsvWriter::num(r.seed),
                   CsvWriter::num(r.wall_ms)});
  raw.finish();

  CsvWriter agg(agg_path_for(cfg.out_path),
                {"experiment", "kind", "target", "D", "lambda", "lambdaD", "W", "H", "chi",
                 "n", "mean_s2", "std_s2", "stderr_s2", "converged", "conv_shift"});
  for (const auto& p : res.points)
    agg.write_row({experiment_kind_name(cfg.experiment), ensemble_kind_name(spec.kind),
                   target_kind_name(spec.target), CsvWriter::num(p.D),
                   CsvWriter::num(p.lambda), CsvWriter::num(p.lambda_d), CsvWriter::num(p.W),
                   CsvWriter::num(p.H), CsvWriter::num(p.chi), CsvWriter::num(p.n),
                   CsvWriter::num(p.mean_s2), CsvWriter::num(p.std_s2),
                   CsvWriter::num(p.stderr_s2), p.converged ? "1" : "0",
                   CsvWriter::num(p.conv_shift)});
  agg.finish();
  return {cfg.out_path, agg_path_for(cfg.out_path),
          static_cast<std::int64_t>(res.rows.size())};
}

StatmechModel build_model(StatmechKind kind, std::int64_t D, double mu_or_d) {
  switch (kind) {
    case StatmechKind::Orthogonal10: return build_orthogonal_model(D, mu_or_d / double(D));
    case StatmechKind::Unitary7: return build_unitary_model(D, mu_or_d / double(D));
    case StatmechKind::Rank1Link: return build_rank1_link_model(D, mu_or_d / double(D));
    case StatmechKind::S4Peps:
      return build_s4_model(D, std::max<std::int64_t>(1, std::llround(mu_or_d)));
  }
  fail(Errc::internal, "unreachable");
}

RunSummary run_statmech(const ExperimentConfig& cfg) {
  CsvWriter raw(cfg.out_path,
                {"experiment", "model", "D", "lambda", "mu", "W", "H", "bc",
                 "log_Z_twisted", "log_Z_uniform", "predicted_s2", "wall_time_ms"});
  std::int64_t rows = 0;
  std::vector<std::array<double, 2>> unused;
  for (auto D : cfg.D)
    for (double mu : cfg.mu)
      for (auto W : cfg.W) {
        auto t0 = Clock::now();
        StatmechModel m = build_model(cfg.model, D, mu);
        std::int64_t H = cfg.H > 0 ? cfg.H : 4 * W;
        TwistedRatio r = predicted_entropy(m, W, H, "B", "A");
        raw.write_row({experiment_kind_name(cfg.experiment), statmech_kind_name(cfg.model),
                       CsvWriter::num(D), CsvWriter::num(m.lambda), CsvWriter::num(mu),
                       CsvWriter::num(W), CsvWriter::num(H), "A|B",
                       CsvWriter::num(r.log_Z_twisted), CsvWriter::num(r.log_Z_uniform),
                       CsvWriter::num(r.predicted_s2), CsvWriter::num(ms_since(t0))});
        ++rows;
      }
  raw.finish();
  CsvWriter agg(agg_path_for(cfg.out_path),
                {"experiment", "model", "D", "mu", "W", "n", "mean_predicted_s2",
                 "std_predicted_s2", "stderr_predicted_s2"});
  // deterministic single evaluation per grid point
  CsvTable table = read_csv(cfg.out_path);
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    agg.write_row({experiment_kind_name(cfg.experiment), statmech_kind_name(cfg.model),
                   table.cell(i, "D"), table.cell(i, "mu"), table.cell(i, "W"), "1",
                   table.cell(i, "predicted_s2"), "0", "0"});
  agg.finish();
  return {cfg.out_path, agg_path_for(cfg.out_path), rows};
}

RunSummary run_phase(const ExperimentConfig& cfg) {
  auto t0 = Clock::now();
  auto points = phase_scan(cfg.model, cfg.D, cfg.mu, cfg.W, 4);
  CsvWriter raw(cfg.out_path, {"experiment", "model", "D", "mu", "W", "predicted_s2",
                               "wall_time_ms"});
  std::int64_t rows = 0;
  for (const auto& p : points)
    for (std::size_t i = 0; i < p.Ws.size(); ++i) {
      raw.write_row({experiment_kind_name(cfg.experiment), statmech_kind_name(p.kind),
                     CsvWriter::num(p.D), CsvWriter::num(p.mu), CsvWriter::num(p.Ws[i]),
                     CsvWriter::num(p.s2_by_W[i]), CsvWriter::num(ms_since(t0))});
      ++rows;
    }
  raw.finish();
  CsvWriter agg(agg_path_for(cfg.out_path),
                {"experiment", "model", "D", "mu", "line_tension"});
  for (const auto& p : points)
    agg.write_row({experiment_kind_name(cfg.experiment), statmech_kind_name(p.kind),
                   CsvWriter::num(p.D), CsvWriter::num(p.mu),
                   CsvWriter::num(p.line_tension)});
  agg.finish();
  return {cfg.out_path, agg_path_for(cfg.out_path), rows};
}

RunSummary run_peps_entropy(const ExperimentConfig& cfg) {
  PepsEntropySpec spec;
  spec.Ds = cfg.D;
  spec.ds = cfg.d;
  spec.Ws = cfg.W;
  spec.trials = cfg.trials;
  spec.chi = cfg.chi;
  spec.rel_tol = cfg.rel_tol;
  spec.master_seed = cfg.master_seed;
  spec.experiment_tag = experiment_tag(cfg);
  spec.workers = cfg.workers;
  PepsEntropyResult res = peps_entropy_experiment(spec);

  CsvWriter raw(cfg.out_path,
                {"experiment", "D", "d", "W", "trial", "s2", "seed", "wall_time_ms"});
  for (const auto& r : res.rows)
    raw.write_row({experiment_kind_name(cfg.experiment), CsvWriter::num(r.D),
                   CsvWriter::num(r.d), CsvWriter::num(r.W), CsvWriter::num(r.trial),
                   CsvWriter::num(r.s2), CsvWriter::num(r.seed), CsvWriter::num(r.wall_ms)});
  raw.finish();

  CsvWriter agg(agg_path_for(cfg.out_path),
                {"experiment", "D", "d", "W", "n", "mean_s2", "std_s2", "stderr_s2"});
  for (auto D : cfg.D)
    for (auto d : cfg.d)
      for (auto W : cfg.W) {
        std::vector<double> xs;
        for (const auto& r : res.rows)
          if (r.D == D && r.d == d && r.W == W) xs.push_back(r.s2);
        Stats s = stats_of(xs);
        agg.write_row({experiment_kind_name(cfg.experiment), CsvWriter::num(D),
                       CsvWriter::num(d), CsvWriter::num(W), CsvWriter::num(s.n),
                       CsvWriter::num(s.mean), CsvWriter::num(s.stddev),
                       CsvWriter::num(s.stderr_est)});
      }
  agg.finish();

  CsvWriter fit(cfg.out_path + ".fit.csv", {"experiment", "fit", "D", "d", "value"});
  for (const auto& f : res.fits)
    fit.write_row({experiment_kind_name(cfg.experiment), "slope_vs_w", CsvWriter::num(f.D),
                   CsvWriter::num(f.d), CsvWriter::num(f.slope_vs_w)});
  for (const auto& [D, alpha] : res.alpha_by_D)
    fit.write_row({experiment_kind_name(cfg.experiment), "alpha_decay", CsvWriter::num(D),
                   "", CsvWriter::num(alpha)});
  fit.finish();
  return {cfg.out_path, agg_path_for(cfg.out_path),
          static_cast<std::int64_t>(res.rows.size())};
}

RunSummary run_positive_sum(const ExperimentConfig& cfg) {
  CsvWriter raw(cfg.out_path,
                {"experiment", "D", "d", "sample", "success", "recon_error",
                 "min_eigenvalue", "seed", "wall_time_ms"});
  CsvWriter est(cfg.out_path + ".est.csv",
                {"experiment", "D", "d", "rows", "cols", "K", "estimate", "stderr",
                 "exact", "dev_over_stderr", "min_plaquette_term", "average_sign",
                 "negative_terms", "seed", "wall_time_ms"});
  std::int64_t nrows = 0;
  for (auto D : cfg.D)
    for (auto d : cfg.d) {
      std::uint64_t point = derive_seed(
          cfg.master_seed, {experiment_tag(cfg), static_cast<std::uint64_t>(D),
                            static_cast<std::uint64_t>(d)});
      // decomposition success log on single-site Haar tensors
      for (std::int64_t s = 0; s < cfg.trials; ++s) {
        auto t0 = Clock::now();
        std::uint64_t seed = derive_seed(point, {static_cast<std::uint64_t>(s)});
        Rng rng(seed);
        PepsSpec ps{D, d, seed};
        DoubleLayerTensor dl = double_layer(make_peps_tensor(ps, rng));
        DenseTensor rho = rho_from_grouping(dl, Grouping::LeftDown_vs_UpRight);
        auto result = separable_decompose(rho, D * D, D * D);
        bool ok = std::holds_alternative<SeparableDecomposition>(result);
        double recon = std::numeric_limits<double>::quiet_NaN();
        double min_ev = std::numeric_limits<double>::quiet_NaN();
        if (ok) {
          const auto& dec = std::get<SeparableDecomposition>(result);
          recon = separable_reconstruction_error(dec, rho);
          min_ev = std::numeric_limits<double>::infinity();
          for (const auto& term : dec.terms) {
            for (const auto* sigma : {&term.sigma_a, &term.sigma_b}) {
              std::vector<double> vals;
              std::vector<cx> vecs;
              linalg::eigh_complex(sigma->dim(0), sigma->cdata().data(), vals, vecs);
              min_ev = std::min(min_ev, vals.front());
            }
          }
        } else {
          min_ev = std::get<SeparableFailure>(result).offending_coefficient;
        }
        raw.write_row({experiment_kind_name(cfg.experiment), CsvWriter::num(D),
                       CsvWriter::num(d), CsvWriter::num(s), ok ? "1" : "0",
                       CsvWriter::num(recon), CsvWriter::num(min_ev), CsvWriter::num(seed),
                       CsvWriter::num(ms_since(t0))});
        ++nrows;
      }
      // norm estimate on the configured lattice, when all sites decompose
      {
        auto t0 = Clock::now();
        std::uint64_t seed = derive_seed(point, {0x6e6574ULL});
        PepsSpec ps{D, d, seed};
        auto sites = sample_double_layer_sites(ps, cfg.rows, cfg.cols);
        std::vector<SeparableDecomposition> decomps;
        bool all_ok = true;
        for (std::int64_t idx = 0; idx < cfg.rows * cfg.cols; ++idx) {
          Grouping g = site_grouping(idx / cfg.cols, idx % cfg.cols);
          DenseTensor rho = rho_from_grouping(sites[idx], g);
          auto dims = [&] {
            std::array<std::int64_t, 2> nab{1, 1};
            // pair dims from the mask: product of the two grouped ket legs
            auto cd = [&](bool present) { return present ? D : 1; };
            const LegMask& m = sites[idx].legs;
            if (g == Grouping::LeftDown_vs_UpRight) {
              nab[0] = cd(m.left) * cd(m.down);
              nab[1] = cd(m.up) * cd(m.right);
            } else {
              nab[0] = cd(m.right) * cd(m.down);
              nab[1] = cd(m.left) * cd(m.up);
            }
            return nab;
          }();
          auto result = separable_decompose(rho, dims[0], dims[1]);
          if (!std::holds_alternative<SeparableDecomposition>(result)) {
            all_ok = false;
            break;
          }
          auto dec = std::get<SeparableDecomposition>(result);
          dec.grouping = g;
          decomps.push_back(std::move(dec));
        }
        if (all_ok) {
          Rng rng(derive_seed(point, {0x6d63ULL}));
          PositiveSumTerms terms =
              positive_sum_estimate(sites, cfg.rows, cfg.cols, decomps, cfg.K, rng);
          LatticeNetwork net = sample_peps_norm_network(ps, cfg.rows, cfg.cols, false);
          ContractionValue exact = transfer_value(net);
          double exact_val = exact.value.real();
          double dev = std::abs(terms.estimate.mean.real() - exact_val) /
                       std::max(terms.estimate.stderr_est, 1e-300);
          est.write_row({experiment_kind_name(cfg.experiment), CsvWriter::num(D),
                         CsvWriter::num(d), CsvWriter::num(cfg.rows),
                         CsvWriter::num(cfg.cols), CsvWriter::num(cfg.K),
                         CsvWriter::num(terms.estimate.mean.real()),
                         CsvWriter::num(terms.estimate.stderr_est),
                         CsvWriter::num(exact_val), CsvWriter::num(dev),
                         CsvWriter::num(terms.min_term), CsvWriter::num(terms.average_sign),
                         CsvWriter::num(terms.negative_terms), CsvWriter::num(seed),
                         CsvWriter::num(ms_since(t0))});
        } else {
          est.write_row({experiment_kind_name(cfg.experiment), CsvWriter::num(D),
                         CsvWriter::num(d), CsvWriter::num(cfg.rows),
                         CsvWriter::num(cfg.cols), CsvWriter::num(cfg.K), "nan", "nan",
                         "nan", "nan", "nan", "nan", "0", CsvWriter::num(seed),
                         CsvWriter::num(ms_since(t0))});
        }
      }
    }
  raw.finish();
  est.finish();
  return {cfg.out_path, cfg.out_path + ".est.csv", nrows};
}

RunSummary run_gauge(const ExperimentConfig& cfg) {
  GaugeMode mode = gauge_mode_from_name(cfg.gauge_mode);
  CsvWriter raw(cfg.out_path,
                {"experiment", "mode", "tensor", "iter", "objective", "cond_X", "cond_Y",
                 "wall_time_ms"});
  CsvWriter agg(agg_path_for(cfg.out_path),
                {"experiment", "mode", "tensor", "D", "d", "objective_start",
                 "objective_end", "s2_before", "s2_after", "value_drift", "seed"});
  const std::int64_t D = cfg.D.front();
  const std::int64_t d = cfg.d.front();
  std::int64_t nrows = 0;
  for (std::int64_t tensor_idx = 0; tensor_idx < cfg.trials; ++tensor_idx) {
    auto t0 = Clock::now();
    std::uint64_t seed = derive_seed(cfg.master_seed,
                                     {experiment_tag(cfg),
                                      static_cast<std::uint64_t>(tensor_idx)});
    Rng rng(seed);
    // shifted double-layer instance: Haar double layer plus an all-ones
    // admixture (PSD-preserving), then a random gauge scramble
    PepsSpec ps{D, d, seed};
    DoubleLayerTensor dl = double_layer(make_peps_tensor(ps, rng));
    std::int64_t bond = D * D;
    DenseTensor site = add(dl.a, DenseTensor::filled({bond, bond, bond, bond},
                                                     cfg.gauge_shift / double(bond * bond)));
    {
      // scramble with a mild random gauge so the starting point is generic
      DenseTensor sx = DenseTensor::identity(bond, Field::Real);
      DenseTensor sy = DenseTensor::identity(bond, Field::Real);
      for (auto& x : sx.rdata()) x += 0.35 * rng.normal() / std::sqrt(double(bond));
      for (auto& x : sy.rdata()) x += 0.35 * rng.normal() / std::sqrt(double(bond));
      site = apply_gauge_to_tensor(site, sx, sy);
    }

    auto boundary_s2 = [&](const DenseTensor& a) {
      const std::int64_t Wb = 3, Hb = 12;
      LatticeNetwork block = uniform_network(a, Hb, Wb, true);
      std::int64_t chi = std::min<std::int64_t>(256, bond * bond * bond);
      BoundaryMps psi = boundary_mps_of_block(block, std::max(chi, bond), 1e-12);
      return renyi_entropy(psi, Hb / 2, 2.0).s2;
    };
    double s2_before = boundary_s2(site);
    GaugeResult res = gauge_optimize(site, mode, cfg.iters, rng);
    double s2_after = boundary_s2(res.transformed);

    // gauge invariance of the contraction value on a closed uniform network
    LatticeNetwork closed = uniform_network(site, 3, 3, false);
    ContractionValue v0 = transfer_value(closed);
    ContractionValue v1 = transfer_value(with_gauge_pairs(closed, res.gauge.X, res.gauge.Y));
    double drift = relative_deviation(v1, v0);

    std::int64_t wall = ms_since(t0);
    for (std::size_t it = 0; it < res.gauge.objective_trace.size(); ++it) {
      raw.write_row({experiment_kind_name(cfg.experiment), gauge_mode_name(mode),
                     CsvWriter::num(tensor_idx), CsvWriter::num(std::int64_t(it)),
                     CsvWriter::num(res.gauge.objective_trace[it]),
                     CsvWriter::num(res.gauge.cond_x), CsvWriter::num(res.gauge.cond_y),
                     CsvWriter::num(wall)});
      ++nrows;
    }
    agg.write_row({experiment_kind_name(cfg.experiment), gauge_mode_name(mode),
                   CsvWriter::num(tensor_idx), CsvWriter::num(D), CsvWriter::num(d),
                   CsvWriter::num(res.gauge.objective_trace.front()),
                   CsvWriter::num(res.gauge.objective_trace.back()),
                   CsvWriter::num(s2_before), CsvWriter::num(s2_after),
                   CsvWriter::num(drift), CsvWriter::num(seed)});
  }
  raw.finish();
  agg.finish();
  return {cfg.out_path, agg_path_for(cfg.out_path), nrows};
}

RunSummary run_oracle(const ExperimentConfig& cfg) {
  CsvWriter raw(cfg.out_path,
                {"experiment", "case", "kind", "D", "lambda", "instance", "rel_dev",
                 "rel_dev_rowwise", "seed", "wall_time_ms"});
  std::vector<double> lambdas = cfg.lambda.empty() ? std::vector<double>{0.0, 0.5, 2.0}
                                                   : cfg.lambda;
  std::vector<EnsembleKind> kinds{EnsembleKind::HaarOrthogonal, EnsembleKind::HaarUnitary,
                                  EnsembleKind::GaussianReal, EnsembleKind::GaussianComplex};
  std::int64_t case_idx = 0;
  double max_dev = 0.0;
  for (auto kind : kinds)
    for (auto D : cfg.D)
      for (double lam : lambdas)
        for (std::int64_t inst = 0; inst < cfg.trials; ++inst) {
          auto t0 = Clock::now();
          std::uint64_t seed = derive_seed(
              cfg.master_seed,
              {experiment_tag(cfg), static_cast<std::uint64_t>(kind),
               static_cast<std::uint64_t>(D), bits(lam),
               static_cast<std::uint64_t>(inst)});
          EnsembleSpec spec{kind, D, lam, {}, seed};
          LatticeNetwork net = sample_network(spec, Geometry::OpenRect, 3, 3);
          ContractionValue brute = brute_force_value(net);
          ContractionValue transfer = transfer_value(net);
          ContractionValue rowwise = transfer_value(transposed(net));
          double dev = relative_deviation(transfer, brute);
          double dev_row = relative_deviation(rowwise, brute);
          max_dev = std::max({max_dev, dev, dev_row});
          raw.write_row({experiment_kind_name(cfg.experiment), CsvWriter::num(case_idx),
                         ensemble_kind_name(kind), CsvWriter::num(D), CsvWriter::num(lam),
                         CsvWriter::num(inst), CsvWriter::num(dev), CsvWriter::num(dev_row),
                         CsvWriter::num(seed), CsvWriter::num(ms_since(t0))});
          ++case_idx;
        }
  raw.finish();
  CsvWriter agg(agg_path_for(cfg.out_path), {"experiment", "cases", "max_rel_dev"});
  agg.write_row({experiment_kind_name(cfg.experiment), CsvWriter::num(case_idx),
                 CsvWriter::num(max_dev)});
  agg.finish();
  return {cfg.out_path, agg_path_for(cfg.out_path), case_idx};
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  switch (cfg.experiment) {
    case ExperimentKind::DeltaF: return run_deltaf(cfg);
    case ExperimentKind::EntropyScan: return run_entropy(cfg);
    case ExperimentKind::Interpolation: return run_entropy(cfg);
    case ExperimentKind::Statmech: return run_statmech(cfg);
    case ExperimentKind::PhaseScan: return run_phase(cfg);
    case ExperimentKind::PepsEntropy: return run_peps_entropy(cfg);
    case ExperimentKind::PositiveSum: return run_positive_sum(cfg);
    case ExperimentKind::GaugeOpt: return run_gauge(cfg);
    case ExperimentKind::OracleSuite: return run_oracle(cfg);
  }
  fail(Errc::internal, "unreachable");
}

void emit_plot_data(const std::string& raw_csv, const std::string& style,
                    const std::string& out_path) {
  CsvTable table = read_csv(raw_csv);
  struct Key {
    std::string series;
    double x;
    bool operator<(const Key& o) const {
      return series != o.series ? series < o.series : x < o.x;
    }
  };
  std::map<Key, std::vector<double>> groups;

  if (style == "deltaf") {
    for (std::size_t i = 0; i < table.rows.size(); ++i)
      groups[{"D=" + table.cell(i, "D"), table.number(i, "lambda")}].push_back(
          table.number(i, "delta_f"));
  } else if (style == "entropy") {
    for (std::size_t i = 0; i < table.rows.size(); ++i)
      groups[{"W=" + table.cell(i, "W"), table.number(i, "lambdaD")}].push_back(
          table.number(i, "s2") / table.number(i, "W"));
  } else if (style == "interp") {
    for (std::size_t i = 0; i < table.rows.size(); ++i)
      groups[{"D=" + table.cell(i, "D"), table.number(i, "lambda")}].push_back(
          table.number(i, "s2"));
  } else if (style == "peps") {
    for (std::size_t i = 0; i < table.rows.size(); ++i)
      groups[{"D=" + table.cell(i, "D") + ",d=" + table.cell(i, "d"),
              table.number(i, "W")}]
          .push_back(table.number(i, "s2"));
  } else {
    fail(Errc::format, "unknown plot style: " + style);
  }

  CsvWriter out(out_path, {"x", "y", "yerr", "series"});
  for (const auto& [key, xs] : groups) {
    Stats s = stats_of(xs);
    out.write_row({CsvWriter::num(key.x), CsvWriter::num(s.mean),
                   CsvWriter::num(s.stderr_est), key.series});
  }
  out.finish();
}

}  // namespace tnsign
