#include "tnsign/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "tnsign/linalg.hpp"
#include "transfer_detail.hpp"

namespace tnsign {

const char* geometry_name(Geometry g) {
  return g == Geometry::OpenRect ? "open" : "cylinder";
}

Geometry geometry_from_name(const std::string& s) {
  if (s == "open") return Geometry::OpenRect;
  if (s == "cylinder") return Geometry::CylinderRows;
  fail(Errc::argument, "unknown geometry: " + s);
}

namespace {

int leg_position(const LegMask& m, char which) {
  int pos = 0;
  if (which == 'l') return m.left ? 0 : -1;
  pos += m.left ? 1 : 0;
  if (which == 'r') return m.right ? pos : -1;
  pos += m.right ? 1 : 0;
  if (which == 'u') return m.up ? pos : -1;
  pos += m.up ? 1 : 0;
  if (which == 'd') return m.down ? pos : -1;
  fail(Errc::internal, "bad leg tag");
}

struct Edge {
  std::int64_t site_a, site_b;
  int leg_a, leg_b;  // positions within the present legs
  std::int64_t dim;
};

std::vector<Edge> edge_list(const LatticeNetwork& net) {
  std::vector<Edge> edges;
  const bool cyl = net.geometry == Geometry::CylinderRows;
  for (std::int64_t r = 0; r < net.rows; ++r) {
    for (std::int64_t c = 0; c < net.cols; ++c) {
      const auto& m = net.mask(r, c);
      std::int64_t s = r * net.cols + c;
      if (m.right && c + 1 < net.cols) {
        const auto& mb = net.mask(r, c + 1);
        require(mb.left, Errc::dimension, "edge without matching leg");
        edges.push_back({s, r * net.cols + c + 1, leg_position(m, 'r'),
                         leg_position(mb, 'l'), net.bond_dim});
      }
      if (m.down && (r + 1 < net.rows || cyl)) {
        std::int64_t r2 = (r + 1) % net.rows;
        const auto& mb = net.mask(r2, c);
        require(mb.up, Errc::dimension, "edge without matching leg");
        edges.push_back({s, r2 * net.cols + c, leg_position(m, 'd'),
                         leg_position(mb, 'u'), net.bond_dim});
      }
    }
  }
  return edges;
}

struct Dangler {
  std::int64_t site;
  char which;
};

std::vector<Dangler> dangling_legs(const LatticeNetwork& net) {
  std::vector<Dangler> out;
  const bool cyl = net.geometry == Geometry::CylinderRows;
  for (std::int64_t r = 0; r < net.rows; ++r)
    for (std::int64_t c = 0; c < net.cols; ++c) {
      const auto& m = net.mask(r, c);
      std::int64_t s = r * net.cols + c;
      if (m.left && c == 0) out.push_back({s, 'l'});
      if (m.right && c == net.cols - 1) out.push_back({s, 'r'});
      if (m.up && r == 0 && !cyl) out.push_back({s, 'u'});
      if (m.down && r == net.rows - 1 && !cyl) out.push_back({s, 'd'});
    }
  return out;
}

}  // namespace

bool LatticeNetwork::has_open_legs() const { return !dangling_legs(*this).empty(); }

std::int64_t LatticeNetwork::edge_count() const {
  return static_cast<std::int64_t>(edge_list(*this).size());
}

void LatticeNetwork::validate() const {
  require(rows >= 1 && cols >= 1, Errc::argument, "network must be non-empty");
  require(tensors.size() == masks.size() &&
              tensors.size() == static_cast<std::size_t>(rows * cols),
          Errc::dimension, "network site count mismatch");
  if (geometry == Geometry::CylinderRows)
    require(rows >= 2, Errc::argument, "cylinder circumference must be >= 2");
  for (std::int64_t s = 0; s < rows * cols; ++s) {
    require(tensors[s].rank() == masks[s].count(), Errc::dimension,
            "tensor rank does not match its leg mask");
    for (auto d : tensors[s].shape())
      require(d == bond_dim, Errc::dimension, "leg dimension does not match bond_dim");
  }
  edge_list(*this);  // checks edge consistency
}

LatticeNetwork sample_network(const EnsembleSpec& spec, Geometry geometry,
                              std::int64_t rows, std::int64_t cols,
                              const NetworkOptions& opts) {
  require(rows >= 1 && cols >= 1, Errc::argument, "network must be non-empty");
  LatticeNetwork net;
  net.geometry = geometry;
  net.rows = rows;
  net.cols = cols;
  net.bond_dim = spec.bond_dim;
  net.open_right_edge = opts.open_right_edge;
  const bool cyl = geometry == Geometry::CylinderRows;
  if (cyl) require(rows >= 2, Errc::argument, "cylinder circumference must be >= 2");
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) {
      LegMask m;
      m.left = opts.all_bulk_columns || c > 0;
      m.right = opts.all_bulk_columns || c < cols - 1 || opts.open_right_edge;
      m.up = cyl || r > 0;
      m.down = cyl || r < rows - 1;
      Rng site_rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(r),
                                           static_cast<std::uint64_t>(c)}));
      net.masks.push_back(m);
      net.tensors.push_back(make_site_tensor(spec, m, site_rng));
    }
  return net;
}

ContractionValue make_contraction_value(cx unscaled, double log_accum) {
  ContractionValue out;
  double mag = std::abs(unscaled);
  if (mag == 0.0) {
    out.log_magnitude = -std::numeric_limits<double>::infinity();
    out.sign_or_phase = 1.0;
    out.value = 0.0;
    return out;
  }
  out.log_magnitude = log_accum + std::log(mag);
  out.sign_or_phase = unscaled / mag;
  out.value = out.sign_or_phase * std::exp(out.log_magnitude);
  return out;
}

double relative_deviation(const ContractionValue& a, const ContractionValue& b) {
  if (std::isinf(b.log_magnitude) && b.log_magnitude < 0)
    return std::isinf(a.log_magnitude) && a.log_magnitude < 0 ? 0.0
           : std::numeric_limits<double>::infinity();
  // |a - b| / |b| computed at b's scale to stay finite
  cx av = std::isinf(a.log_magnitude) && a.log_magnitude < 0
              ? cx(0.0)
              : a.sign_or_phase * std::exp(a.log_magnitude - b.log_magnitude);
  return std::abs(av - b.sign_or_phase);
}

ContractionValue brute_force_value(const LatticeNetwork& net) {
  net.validate();
  require(!net.has_open_legs(), Errc::argument, "brute_force_value needs a closed network");
  auto edges = edge_list(net);
  const std::int64_t E = static_cast<std::int64_t>(edges.size());
  const double logconfigs = E * std::log2(double(net.bond_dim));
  require(logconfigs <= 24.0 + 1e-9, Errc::size_guard,
          "brute force guard exceeded: D^{#edges} > 2^24");

  // per site: list of (edge index, stride into its flat entry index)
  const std::int64_t nsites = net.rows * net.cols;
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> site_edges(nsites);
  for (std::int64_t e = 0; e < E; ++e) {
    site_edges[edges[e].site_a].push_back({e, edges[e].leg_a});
    site_edges[edges[e].site_b].push_back({e, edges[e].leg_b});
  }
  for (std::int64_t s = 0; s < nsites; ++s) {
    const auto& shape = net.tensors[s].shape();
    require(static_cast<int>(site_edges[s].size()) == net.tensors[s].rank(), Errc::internal,
            "site legs must all be matched");
    std::vector<std::int64_t> stride(shape.size(), 1);
    for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i)
      stride[i] = stride[i + 1] * shape[i + 1];
    for (auto& [e, leg] : site_edges[s]) leg = stride[leg];
  }

  const std::int64_t D = net.bond_dim;
  std::int64_t total = 1;
  for (std::int64_t e = 0; e < E; ++e) total *= D;
  std::vector<std::int64_t> config(E, 0);

  const bool complex_net =
      std::any_of(net.tensors.begin(), net.tensors.end(),
                  [](const DenseTensor& t) { return t.is_complex(); });
  cx sum = 0.0;
  double rsum = 0.0;
  for (std::int64_t it = 0; it < total; ++it) {
    if (complex_net) {
      cx term = 1.0;
      for (std::int64_t s = 0; s < nsites; ++s) {
        std::int64_t flat = 0;
        for (auto& [e, stride] : site_edges[s]) flat += stride * config[e];
        term *= net.tensors[s].at(flat);
      }
      sum += term;
    } else {
      double term = 1.0;
      for (std::int64_t s = 0; s < nsites; ++s) {
        std::int64_t flat = 0;
        for (auto& [e, stride] : site_edges[s]) flat += stride * config[e];
        term *= net.tensors[s].rdata()[flat];
      }
      rsum += term;
    }
    // row-major edge order, least significant (edge 0) fastest
    for (std::int64_t e = 0; e < E; ++e) {
      if (++config[e] < D) break;
      config[e] = 0;
    }
  }
  return make_contraction_value(complex_net ? sum : cx(rsum), 0.0);
}

namespace {

template <typename T>
ContractionValue transfer_impl(const LatticeNetwork& net) {
  detail::TransferState<T> st;
  std::vector<DenseTensor> col(net.rows);
  std::vector<LegMask> cmasks(net.rows);
  for (std::int64_t c = 0; c < net.cols; ++c) {
    for (std::int64_t r = 0; r < net.rows; ++r) {
      col[r] = net.site(r, c);
      cmasks[r] = net.mask(r, c);
    }
    if (net.geometry == Geometry::OpenRect)
      detail::apply_open_column(st, std::span<const DenseTensor>(col),
                                std::span<const LegMask>(cmasks), net.bond_dim);
    else
      detail::apply_cylinder_column(st, std::span<const DenseTensor>(col),
                                    std::span<const LegMask>(cmasks), net.bond_dim);
    st.rescale();
    if (st.zero) return make_contraction_value(0.0, 0.0);
  }
  require(st.v.size() == 1, Errc::internal, "transfer did not reduce to a scalar");
  if constexpr (std::is_same_v<T, cx>)
    return make_contraction_value(st.v[0], st.log_accum);
  else
    return make_contraction_value(cx(st.v[0]), st.log_accum);
}

}  // namespace

ContractionValue transfer_value(const LatticeNetwork& net) {
  net.validate();
  require(!net.has_open_legs(), Errc::argument, "transfer_value needs a closed network");
  const double logdim = net.rows * std::log2(double(net.bond_dim));
  require(logdim <= 20.0 + 1e-9, Errc::size_guard,
          "transfer guard exceeded: D^rows > 2^20");
  const bool complex_net =
      std::any_of(net.tensors.begin(), net.tensors.end(),
                  [](const DenseTensor& t) { return t.is_complex(); });
  return complex_net ? transfer_impl<cx>(net) : transfer_impl<double>(net);
}

// sample_peps_norm_network is defined in peps.cpp next to double_layer.

LatticeNetwork abs_network(const LatticeNetwork& net) {
  LatticeNetwork out = net;
  for (auto& t : out.tensors) t = elementwise_abs(t);
  return out;
}

LatticeNetwork transposed(const LatticeNetwork& net) {
  require(net.geometry == Geometry::OpenRect, Errc::argument,
          "transpose is defined for open rectangles");
  require(!net.open_right_edge, Errc::argument, "transpose needs a closed network");
  LatticeNetwork out;
  out.geometry = net.geometry;
  out.rows = net.cols;
  out.cols = net.rows;
  out.bond_dim = net.bond_dim;
  out.tensors.resize(net.tensors.size());
  out.masks.resize(net.masks.size());
  for (std::int64_t r = 0; r < net.rows; ++r)
    for (std::int64_t c = 0; c < net.cols; ++c) {
      const auto& m = net.mask(r, c);
      LegMask mt{m.up, m.down, m.left, m.right};  // l<-u, r<-d, u<-l, d<-r
      // permutation of present legs under the same relabeling
      std::vector<std::pair<char, int>> order;
      if (m.up) order.push_back({'u', leg_position(m, 'u')});
      if (m.down) order.push_back({'d', leg_position(m, 'd')});
      if (m.left) order.push_back({'l', leg_position(m, 'l')});
      if (m.right) order.push_back({'r', leg_position(m, 'r')});
      std::vector<int> perm;
      for (auto& [tag, pos] : order) perm.push_back(pos);
      out.masks[c * out.cols + r] = mt;
      out.tensors[c * out.cols + r] = net.site(r, c).permuted(perm);
    }
  return out;
}

LatticeNetwork close_open_legs_with_ones(const LatticeNetwork& net) {
  LatticeNetwork out = net;
  out.open_right_edge = false;
  auto ones = DenseTensor::filled({net.bond_dim}, 1.0);
  for (auto& dl : dangling_legs(net)) {
    auto& m = out.masks[dl.site];
    int pos = leg_position(m, dl.which);
    out.tensors[dl.site] = contract_pair(out.tensors[dl.site], {pos}, ones, {0});
    switch (dl.which) {
      case 'l': m.left = false; break;
      case 'r': m.right = false; break;
      case 'u': m.up = false; break;
      case 'd': m.down = false; break;
    }
  }
  return out;
}

LatticeNetwork with_gauge_pairs(const LatticeNetwork& net, const DenseTensor& X,
                                const DenseTensor& Y) {
  require(X.rank() == 2 && X.dim(0) == net.bond_dim && X.dim(1) == net.bond_dim,
          Errc::dimension, "X must be bond_dim x bond_dim");
  require(Y.rank() == 2 && Y.dim(0) == net.bond_dim && Y.dim(1) == net.bond_dim,
          Errc::dimension, "Y must be bond_dim x bond_dim");
  DenseTensor Xinv, Yinv;
  if (X.is_complex()) {
    auto inv = linalg::inverse_complex(net.bond_dim, X.cdata().data());
    Xinv = DenseTensor::from_complex({net.bond_dim, net.bond_dim}, std::move(inv));
  } else {
    auto inv = linalg::inverse_real(net.bond_dim, X.rdata().data());
    Xinv = DenseTensor::from_real({net.bond_dim, net.bond_dim}, std::move(inv));
  }
  if (Y.is_complex()) {
    auto inv = linalg::inverse_complex(net.bond_dim, Y.cdata().data());
    Yinv = DenseTensor::from_complex({net.bond_dim, net.bond_dim}, std::move(inv));
  } else {
    auto inv = linalg::inverse_real(net.bond_dim, Y.rdata().data());
    Yinv = DenseTensor::from_real({net.bond_dim, net.bond_dim}, std::move(inv));
  }

  LatticeNetwork out = net;
  for (const auto& e : edge_list(net)) {
    bool horizontal = (e.site_a / net.cols == e.site_b / net.cols);
    const DenseTensor& G = horizontal ? X : Y;
    const DenseTensor& Ginv = horizontal ? Xinv : Yinv;
    out.tensors[e.site_a] = apply_to_leg(out.tensors[e.site_a], e.leg_a, G, false);
    out.tensors[e.site_b] = apply_to_leg(out.tensors[e.site_b], e.leg_b, Ginv, true);
  }
  return out;
}

LatticeNetwork uniform_network(const DenseTensor& bulk, std::int64_t rows,
                               std::int64_t cols, bool open_right_edge) {
  require(bulk.rank() == 4, Errc::argument, "uniform_network needs a 4-leg tensor");
  const std::int64_t D = bulk.dim(0);
  for (int i = 1; i < 4; ++i)
    require(bulk.dim(i) == D, Errc::dimension, "uniform_network needs equal leg dims");
  LatticeNetwork net;
  net.geometry = Geometry::OpenRect;
  net.rows = rows;
  net.cols = cols;
  net.bond_dim = D;
  net.open_right_edge = open_right_edge;
  auto ones = DenseTensor::filled({D}, 1.0);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) {
      LegMask m;
      m.left = c > 0;
      m.right = c < cols - 1 || open_right_edge;
      m.up = r > 0;
      m.down = r < rows - 1;
      DenseTensor t = bulk;
      // contract off-lattice legs with all-ones, highest leg index first
      if (!m.down) t = contract_pair(t, {3}, ones, {0});
      if (!m.up) t = contract_pair(t, {2}, ones, {0});
      if (!m.right) t = contract_pair(t, {1}, ones, {0});
      if (!m.left) t = contract_pair(t, {0}, ones, {0});
      net.masks.push_back(m);
      net.tensors.push_back(std::move(t));
    }
  return net;
}

std::string network_to_json(const LatticeNetwork& net) {
  nlohmann::json j;
  j["geometry"] = geometry_name(net.geometry);
  j["rows"] = net.rows;
  j["cols"] = net.cols;
  j["bond_dim"] = net.bond_dim;
  j["open_right_edge"] = net.open_right_edge;
  nlohmann::json sites = nlohmann::json::array();
  for (std::size_t s = 0; s < net.tensors.size(); ++s) {
    const auto& t = net.tensors[s];
    const auto& m = net.masks[s];
    nlohmann::json js;
    std::string mask;
    if (m.left) mask += 'l';
    if (m.right) mask += 'r';
    if (m.up) mask += 'u';
    if (m.down) mask += 'd';
    js["mask"] = mask;
    js["shape"] = t.shape();
    if (t.is_complex()) {
      std::vector<double> re, im;
      for (const auto& z : t.cdata()) {
        re.push_back(z.real());
        im.push_back(z.imag());
      }
      js["re"] = re;
      js["im"] = im;
    } else {
      js["re"] = std::vector<double>(t.rdata().begin(), t.rdata().end());
    }
    sites.push_back(std::move(js));
  }
  j["sites"] = std::move(sites);
  return j.dump();
}

LatticeNetwork network_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::format, std::string("network JSON parse error: ") + e.what());
  }
  LatticeNetwork net;
  try {
    net.geometry = geometry_from_name(j.at("geometry").get<std::string>());
    net.rows = j.at("rows").get<std::int64_t>();
    net.cols = j.at("cols").get<std::int64_t>();
    net.bond_dim = j.at("bond_dim").get<std::int64_t>();
    net.open_right_edge = j.at("open_right_edge").get<bool>();
    for (const auto& js : j.at("sites")) {
      std::string mask = js.at("mask").get<std::string>();
      LegMask m;
      m.left = mask.find('l') != std::string::npos;
      m.right = mask.find('r') != std::string::npos;
      m.up = mask.find('u') != std::string::npos;
      m.down = mask.find('d') != std::string::npos;
      auto shape = js.at("shape").get<std::vector<std::int64_t>>();
      auto re = js.at("re").get<std::vector<double>>();
      if (js.contains("im")) {
        auto im = js.at("im").get<std::vector<double>>();
        require(im.size() == re.size(), Errc::format, "re/im length mismatch");
        std::vector<cx> data(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) data[i] = {re[i], im[i]};
        net.tensors.push_back(DenseTensor::from_complex(shape, std::move(data)));
      } else {
        net.tensors.push_back(DenseTensor::from_real(shape, std::move(re)));
      }
      net.masks.push_back(m);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, std::string("network JSON field error: ") + e.what());
  }
  net.validate();
  return net;
}

}  // namespace tnsign
