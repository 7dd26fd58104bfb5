#include "tnsign/sign_mc.hpp"

#include <cmath>

#include "transfer_detail.hpp"

namespace tnsign {

McEstimate mc_estimate_value(const LatticeNetwork& net, std::int64_t samples, Rng& rng) {
  net.validate();
  require(!net.has_open_legs(), Errc::argument, "mc_estimate_value needs a closed network");
  require(samples >= 2, Errc::argument, "mc_estimate_value needs at least 2 samples");

  // reuse the brute-force edge bookkeeping: per site, (edge id, stride)
  const std::int64_t E = net.edge_count();
  const std::int64_t nsites = net.rows * net.cols;
  // rebuild the edge->leg mapping the same way brute_force_value does
  struct SiteLeg {
    std::int64_t edge, stride;
  };
  std::vector<std::vector<SiteLeg>> site_edges(nsites);
  {
    // mirror of the internal edge enumeration: row-major, right then down
    const bool cyl = net.geometry == Geometry::CylinderRows;
    std::int64_t e = 0;
    auto leg_pos = [](const LegMask& m, char which) {
      int pos = 0;
      if (which == 'l') return pos;
      pos += m.left ? 1 : 0;
      if (which == 'r') return pos;
      pos += m.right ? 1 : 0;
      if (which == 'u') return pos;
      pos += m.up ? 1 : 0;
      return pos;
    };
    for (std::int64_t r = 0; r < net.rows; ++r)
      for (std::int64_t c = 0; c < net.cols; ++c) {
        const auto& m = net.mask(r, c);
        std::int64_t s = r * net.cols + c;
        if (m.right && c + 1 < net.cols) {
          site_edges[s].push_back({e, leg_pos(m, 'r')});
          site_edges[r * net.cols + c + 1].push_back(
              {e, leg_pos(net.mask(r, c + 1), 'l')});
          ++e;
        }
        if (m.down && (r + 1 < net.rows || cyl)) {
          std::int64_t r2 = (r + 1) % net.rows;
          site_edges[s].push_back({e, leg_pos(m, 'd')});
          site_edges[r2 * net.cols + c].push_back({e, leg_pos(net.mask(r2, c), 'u')});
          ++e;
        }
      }
    require(e == E, Errc::internal, "edge count mismatch");
    for (std::int64_t s = 0; s < nsites; ++s) {
      const auto& shape = net.tensors[s].shape();
      std::vector<std::int64_t> stride(shape.size(), 1);
      for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i)
        stride[i] = stride[i + 1] * shape[i + 1];
      for (auto& sl : site_edges[s]) sl.stride = stride[sl.stride];
    }
  }

  const std::int64_t D = net.bond_dim;
  double log_scale = E * std::log(double(D));  // D^{#edges} rescaling
  double scale = std::exp(log_scale);

  std::vector<std::int64_t> config(static_cast<std::size_t>(E));
  cx acc = 0.0;
  double acc_sq = 0.0;  // sum |t|^2 for the variance
  std::vector<cx> terms(static_cast<std::size_t>(samples));
  for (std::int64_t it = 0; it < samples; ++it) {
    for (auto& x : config) x = static_cast<std::int64_t>(rng.below(D));
    cx term = 1.0;
    for (std::int64_t s = 0; s < nsites; ++s) {
      std::int64_t flat = 0;
      for (const auto& sl : site_edges[s]) flat += sl.stride * config[sl.edge];
      term *= net.tensors[s].at(flat);
    }
    terms[it] = term;
    acc += term;
  }
  cx mean = acc / double(samples);
  for (const auto& t : terms) acc_sq += std::norm(t - mean);
  double sample_std = std::sqrt(acc_sq / double(samples - 1));
  McEstimate out;
  out.mean = scale * mean;
  out.stderr_est = scale * sample_std / std::sqrt(double(samples));
  out.samples = samples;
  return out;
}

LatticeNetwork delta_f_cylinder_network(const EnsembleSpec& spec, std::int64_t W,
                                        std::int64_t L) {
  NetworkOptions opts;
  opts.all_bulk_columns = true;
  return sample_network(spec, Geometry::CylinderRows, W, L, opts);
}

namespace {

template <typename T>
DeltaFRecord delta_f_impl(const EnsembleSpec& spec, std::int64_t W, std::int64_t L,
                          std::int64_t burn_in) {
  detail::TransferState<T> signed_st;
  detail::TransferState<double> abs_st;
  const std::int64_t D = spec.bond_dim;
  const std::int64_t dim = [&] {
    std::int64_t n = 1;
    for (std::int64_t i = 0; i < W; ++i) n *= D;
    return n;
  }();
  signed_st.v.assign(static_cast<std::size_t>(dim), T(1));
  abs_st.v.assign(static_cast<std::size_t>(dim), 1.0);
  signed_st.rescale();
  abs_st.rescale();

  LegMask bulk{true, true, true, true};
  std::vector<LegMask> masks(static_cast<std::size_t>(W), bulk);
  std::vector<DenseTensor> col(static_cast<std::size_t>(W));
  std::vector<DenseTensor> col_abs(static_cast<std::size_t>(W));

  DeltaFRecord rec;
  rec.W = W;
  rec.L = L;
  rec.burn_in = burn_in;
  rec.seed = spec.seed;
  rec.slice_series.reserve(static_cast<std::size_t>(L));

  for (std::int64_t c = 0; c < L; ++c) {
    for (std::int64_t r = 0; r < W; ++r) {
      Rng site_rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(r),
                                           static_cast<std::uint64_t>(c)}));
      col[r] = make_site_tensor(spec, bulk, site_rng);
      col_abs[r] = elementwise_abs(col[r]);
    }
    detail::apply_cylinder_column(signed_st, std::span<const DenseTensor>(col),
                                  std::span<const LegMask>(masks), D);
    detail::apply_cylinder_column(abs_st, std::span<const DenseTensor>(col_abs),
                                  std::span<const LegMask>(masks), D);
    double rs = signed_st.rescale();
    double ra = abs_st.rescale();
    require(!abs_st.zero, Errc::internal, "abs-network transfer collapsed to zero");
    require(!signed_st.zero, Errc::internal, "signed transfer collapsed to zero");
    rec.slice_series.push_back((std::log(ra) - std::log(rs)) / double(W));
  }

  double sum = 0.0, sumsq = 0.0;
  const std::int64_t kept = L - burn_in;
  for (std::int64_t t = burn_in; t < L; ++t) {
    sum += rec.slice_series[t];
    sumsq += rec.slice_series[t] * rec.slice_series[t];
  }
  rec.delta_f = sum / double(kept);
  if (kept > 1) {
    double var = (sumsq - sum * sum / double(kept)) / double(kept - 1);
    rec.stderr_est = std::sqrt(std::max(0.0, var) / double(kept));
  }
  cx fsum = 0.0;
  for (const auto& x : signed_st.v) fsum += cx(x);
  rec.final_phase = std::abs(fsum) > 0 ? fsum / std::abs(fsum) : cx(1.0);
  return rec;
}

}  // namespace

DeltaFRecord cylinder_delta_f(const EnsembleSpec& spec, std::int64_t W, std::int64_t L,
                              std::int64_t burn_in) {
  require(W >= 2, Errc::argument, "cylinder circumference must be >= 2");
  require(burn_in >= 0 && burn_in < L, Errc::argument, "burn_in must be < L");
  const double logdim = W * std::log2(double(spec.bond_dim));
  require(logdim <= 16.0 + 1e-9, Errc::size_guard,
          "delta-f guard exceeded: D^W > 2^16");
  if (ensemble_is_complex(spec.kind)) return delta_f_impl<cx>(spec, W, L, burn_in);
  return delta_f_impl<double>(spec, W, L, burn_in);
}

}  // namespace tnsign
