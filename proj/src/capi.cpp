#include "tnsign.h"

#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "tnsign/experiments.hpp"
#include "tnsign/peps.hpp"
#include "tnsign/sign_mc.hpp"

namespace {

thread_local std::string g_last_error;

tnsign_status status_from(tnsign::Errc c) {
  using tnsign::Errc;
  switch (c) {
    case Errc::ok: return TNSIGN_OK;
    case Errc::argument: return TNSIGN_ERR_ARGUMENT;
    case Errc::dimension: return TNSIGN_ERR_DIMENSION;
    case Errc::size_guard: return TNSIGN_ERR_SIZE_GUARD;
    case Errc::config: return TNSIGN_ERR_CONFIG;
    case Errc::format: return TNSIGN_ERR_FORMAT;
    case Errc::io: return TNSIGN_ERR_IO;
    case Errc::internal: return TNSIGN_ERR_INTERNAL;
  }
  return TNSIGN_ERR_INTERNAL;
}

template <typename F>
tnsign_status guarded(F&& f) {
  try {
    f();
    return TNSIGN_OK;
  } catch (const tnsign::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TNSIGN_ERR_INTERNAL;
  }
}

tnsign_status need(bool cond, tnsign_status s, const char* msg) {
  if (!cond) {
    g_last_error = msg;
    return s;
  }
  return TNSIGN_OK;
}

tnsign::EnsembleSpec ensemble_from_json(const nlohmann::json& j) {
  tnsign::EnsembleSpec spec;
  if (j.contains("kind"))
    spec.kind = tnsign::ensemble_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("D")) spec.bond_dim = j.at("D").get<std::int64_t>();
  if (j.contains("lambda")) spec.shift = j.at("lambda").get<double>();
  if (j.contains("target"))
    spec.target.kind = tnsign::target_kind_from_name(j.at("target").get<std::string>());
  if (j.contains("target_seed")) spec.target.seed = j.at("target_seed").get<std::uint64_t>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

}  // namespace

struct tnsign_tensor {
  tnsign::DenseTensor t;
};
struct tnsign_network {
  tnsign::LatticeNetwork net;
};
struct tnsign_model {
  tnsign::StatmechModel m;
};

extern "C" {

const char* tnsign_version(void) { return "0.1.0"; }

const char* tnsign_status_name(tnsign_status s) {
  switch (s) {
    case TNSIGN_OK: return "ok";
    case TNSIGN_ERR_ARGUMENT: return "argument";
    case TNSIGN_ERR_DIMENSION: return "dimension";
    case TNSIGN_ERR_SIZE_GUARD: return "size_guard";
    case TNSIGN_ERR_CONFIG: return "config";
    case TNSIGN_ERR_FORMAT: return "format";
    case TNSIGN_ERR_IO: return "io";
    case TNSIGN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* tnsign_last_error(void) { return g_last_error.c_str(); }

tnsign_status tnsign_tensor_create(const int64_t* shape, int32_t rank, const double* re,
                                   const double* im, tnsign_tensor** out) {
  if (auto s = need(shape && re && out && rank >= 0, TNSIGN_ERR_ARGUMENT,
                    "null argument to tnsign_tensor_create"))
    return s;
  return guarded([&] {
    std::vector<std::int64_t> sh(shape, shape + rank);
    std::int64_t n = 1;
    for (auto d : sh) n *= d;
    if (im) {
      std::vector<tnsign::cx> data(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < n; ++i) data[i] = {re[i], im[i]};
      *out = new tnsign_tensor{tnsign::DenseTensor::from_complex(sh, std::move(data))};
    } else {
      *out = new tnsign_tensor{
          tnsign::DenseTensor::from_real(sh, std::vector<double>(re, re + n))};
    }
  });
}

void tnsign_tensor_destroy(tnsign_tensor* t) { delete t; }

tnsign_status tnsign_tensor_rank(const tnsign_tensor* t, int32_t* out) {
  if (auto s = need(t && out, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  *out = t->t.rank();
  return TNSIGN_OK;
}

tnsign_status tnsign_tensor_shape(const tnsign_tensor* t, int64_t* shape_out) {
  if (auto s = need(t && shape_out, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  for (int i = 0; i < t->t.rank(); ++i) shape_out[i] = t->t.dim(i);
  return TNSIGN_OK;
}

tnsign_status tnsign_tensor_is_complex(const tnsign_tensor* t, int32_t* out) {
  if (auto s = need(t && out, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  *out = t->t.is_complex() ? 1 : 0;
  return TNSIGN_OK;
}

tnsign_status tnsign_tensor_entries(const tnsign_tensor* t, double* re, double* im) {
  if (auto s = need(t && re, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  return guarded([&] {
    for (std::int64_t i = 0; i < t->t.size(); ++i) {
      tnsign::cx z = t->t.at(i);
      re[i] = z.real();
      if (im) im[i] = z.imag();
    }
  });
}

tnsign_status tnsign_tensor_contract(const tnsign_tensor* a, const int32_t* legs_a,
                                     int32_t n_legs, const tnsign_tensor* b,
                                     const int32_t* legs_b, tnsign_tensor** out) {
  if (auto s = need(a && b && out && (n_legs == 0 || (legs_a && legs_b)),
                    TNSIGN_ERR_ARGUMENT, "null argument"))
    return s;
  return guarded([&] {
    std::vector<int> la(legs_a, legs_a + n_legs), lb(legs_b, legs_b + n_legs);
    *out = new tnsign_tensor{tnsign::contract_pair(
        a->t, std::span<const int>(la), b->t, std::span<const int>(lb))};
  });
}

tnsign_status tnsign_tensor_abs(const tnsign_tensor* t, tnsign_tensor** out) {
  if (auto s = need(t && out, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  return guarded([&] { *out = new tnsign_tensor{tnsign::elementwise_abs(t->t)}; });
}

tnsign_status tnsign_tensor_svd_split(const tnsign_tensor* t, const int32_t* left_legs,
                                      int32_t n_left, int64_t chi, double rel_tol,
                                      tnsign_tensor** left, tnsign_tensor** right,
                                      double* sigma, int64_t* kept,
                                      double* discarded_weight) {
  if (auto s = need(t && left_legs && left && right, TNSIGN_ERR_ARGUMENT, "null argument"))
    return s;
  return guarded([&] {
    std::vector<int> ll(left_legs, left_legs + n_left);
    tnsign::SvdSplit sp = tnsign::svd_split(t->t, std::span<const int>(ll), chi, rel_tol);
    *left = new tnsign_tensor{std::move(sp.left)};
    *right = new tnsign_tensor{std::move(sp.right)};
    if (kept) *kept = static_cast<int64_t>(sp.kept_spectrum.size());
    if (sigma)
      for (std::size_t i = 0; i < sp.kept_spectrum.size(); ++i) sigma[i] = sp.kept_spectrum[i];
    if (discarded_weight) *discarded_weight = sp.discarded_weight;
  });
}

tnsign_status tnsign_network_sample(const char* spec_json, tnsign_network** out) {
  if (auto s = need(spec_json && out, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(spec_json);
    tnsign::EnsembleSpec spec = ensemble_from_json(j);
    tnsign::Geometry g = tnsign::Geometry::OpenRect;
    if (j.contains("geometry"))
      g = tnsign::geometry_from_name(j.at("geometry").get<std::string>());
    std::int64_t rows = j.value("rows", std::int64_t(3));
    std::int64_t cols = j.value("cols", std::int64_t(3));
    tnsign::NetworkOptions opts;
    opts.open_right_edge = j.value("open_right_edge", false);
    *out = new tnsign_network{tnsign::sample_network(spec, g, rows, cols, opts)};
  });
}

tnsign_status tnsign_network_sample_peps(const char* spec_json, tnsign_network** out) {
  if (auto s = need(spec_json && out, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(spec_json);
    tnsign::PepsSpec spec;
    spec.bond_dim = j.value("D", std::int64_t(2));
    spec.phys_dim = j.value("d", std::int64_t(2));
    spec.seed = j.value("seed", std::uint64_t(0));
    std::int64_t rows = j.value("rows", std::int64_t(4));
    std::int64_t cols = j.value("cols", std::int64_t(4));
    bool open_right = j.value("open_right_edge", false);
    *out = new tnsign_network{
        tnsign::sample_peps_norm_network(spec, rows, cols, open_right)};
  });
}

void tnsign_network_destroy(tnsign_network* n) { delete n; }

tnsign_status tnsign_network_abs(const tnsign_network* n, tnsign_network** out) {
  if (auto s = need(n && out, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  return guarded([&] { *out = new tnsign_network{tnsign::abs_network(n->net)}; });
}

static tnsign_status value_common(const tnsign_network* n, double* log_magnitude,
                                  double* phase_re, double* phase_im, bool brute) {
  if (auto s = need(n && log_magnitude && phase_re && phase_im, TNSIGN_ERR_ARGUMENT,
                    "null argument"))
    return s;
  return guarded([&] {
    tnsign::ContractionValue v =
        brute ? tnsign::brute_force_value(n->net) : tnsign::transfer_value(n->net);
    *log_magnitude = v.log_magnitude;
    *phase_re = v.sign_or_phase.real();
    *phase_im = v.sign_or_phase.imag();
  });
}

tnsign_status tnsign_network_brute_force_value(const tnsign_network* n,
                                               double* log_magnitude, double* phase_re,
                                               double* phase_im) {
  return value_common(n, log_magnitude, phase_re, phase_im, true);
}

tnsign_status tnsign_network_transfer_value(const tnsign_network* n, double* log_magnitude,
                                            double* phase_re, double* phase_im) {
  return value_common(n, log_magnitude, phase_re, phase_im, false);
}

tnsign_status tnsign_network_to_json(const tnsign_network* n, char* buf, size_t buflen,
                                     size_t* needed) {
  if (auto s = need(n && needed, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  return guarded([&] {
    std::string text = tnsign::network_to_json(n->net);
    *needed = text.size() + 1;
    if (buf && buflen >= text.size() + 1) std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

tnsign_status tnsign_network_from_json(const char* text, tnsign_network** out) {
  if (auto s = need(text && out, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  return guarded([&] { *out = new tnsign_network{tnsign::network_from_json(text)}; });
}

tnsign_status tnsign_model_build(const char* kind, int64_t D, double lambda_or_d,
                                 tnsign_model** out) {
  if (auto s = need(kind && out, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  return guarded([&] {
    tnsign::StatmechKind k = tnsign::statmech_kind_from_name(kind);
    tnsign::StatmechModel m;
    switch (k) {
      case tnsign::StatmechKind::Orthogonal10:
        m = tnsign::build_orthogonal_model(D, lambda_or_d);
        break;
      case tnsign::StatmechKind::Unitary7:
        m = tnsign::build_unitary_model(D, lambda_or_d);
        break;
      case tnsign::StatmechKind::Rank1Link:
        m = tnsign::build_rank1_link_model(D, lambda_or_d);
        break;
      case tnsign::StatmechKind::S4Peps:
        m = tnsign::build_s4_model(D, static_cast<std::int64_t>(lambda_or_d));
        break;
    }
    *out = new tnsign_model{std::move(m)};
  });
}

void tnsign_model_destroy(tnsign_model* m) { delete m; }

tnsign_status tnsign_model_states(const tnsign_model* m, int64_t* q) {
  if (auto s = need(m && q, TNSIGN_ERR_ARGUMENT, "null argument")) return s;
  *q = m->m.q;
  return TNSIGN_OK;
}

tnsign_status tnsign_model_predicted_entropy(const tnsign_model* m, int64_t W, int64_t H,
                                             const char* bc_top, const char* bc_bottom,
                                             double* predicted_s2, double* log_z_twisted,
                                             double* log_z_uniform) {
  if (auto s = need(m && bc_top && bc_bottom && predicted_s2, TNSIGN_ERR_ARGUMENT,
                    "null argument"))
    return s;
  return guarded([&] {
    tnsign::TwistedRatio r = tnsign::predicted_entropy(m->m, W, H, bc_top, bc_bottom);
    *predicted_s2 = r.predicted_s2;
    if (log_z_twisted) *log_z_twisted = r.log_Z_twisted;
    if (log_z_uniform) *log_z_uniform = r.log_Z_uniform;
  });
}

tnsign_status tnsign_cylinder_delta_f(const char* ensemble_json, int64_t W, int64_t L,
                                      int64_t burn_in, double* delta_f,
                                      double* stderr_est) {
  if (auto s = need(ensemble_json && delta_f, TNSIGN_ERR_ARGUMENT, "null argument"))
    return s;
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(ensemble_json);
    tnsign::DeltaFRecord rec =
        tnsign::cylinder_delta_f(ensemble_from_json(j), W, L, burn_in);
    *delta_f = rec.delta_f;
    if (stderr_est) *stderr_est = rec.stderr_est;
  });
}

tnsign_status tnsign_run_experiment(const char* config_json, int64_t* rows_written) {
  if (auto s = need(config_json != nullptr, TNSIGN_ERR_ARGUMENT, "null config")) return s;
  return guarded([&] {
    tnsign::ExperimentConfig cfg = tnsign::config_from_json_text(config_json);
    tnsign::RunSummary summary = tnsign::run_experiment(cfg);
    if (rows_written) *rows_written = summary.rows_written;
  });
}

tnsign_status tnsign_emit_plot_data(const char* raw_csv, const char* style,
                                    const char* out_path) {
  if (auto s = need(raw_csv && style && out_path, TNSIGN_ERR_ARGUMENT, "null argument"))
    return s;
  return guarded([&] { tnsign::emit_plot_data(raw_csv, style, out_path); });
}

tnsign_status tnsign_validate_config(const char* config_json) {
  if (auto s = need(config_json != nullptr, TNSIGN_ERR_ARGUMENT, "null config")) return s;
  return guarded([&] {
    tnsign::validate_config(tnsign::config_from_json_text(config_json));
  });
}

}  // extern "C"
