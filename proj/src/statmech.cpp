#include "tnsign/statmech.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace tnsign {

const char* statmech_kind_name(StatmechKind k) {
  switch (k) {
    case StatmechKind::Orthogonal10: return "orthogonal";
    case StatmechKind::Unitary7: return "unitary";
    case StatmechKind::Rank1Link: return "rank1";
    case StatmechKind::S4Peps: return "s4";
  }
  return "?";
}

StatmechKind statmech_kind_from_name(const std::string& s) {
  if (s == "orthogonal") return StatmechKind::Orthogonal10;
  if (s == "unitary") return StatmechKind::Unitary7;
  if (s == "rank1") return StatmechKind::Rank1Link;
  if (s == "s4") return StatmechKind::S4Peps;
  fail(Errc::argument, "unknown statmech model: " + s);
}

std::vector<double> StatmechModel::boundary_weights(const std::string& name) const {
  if (is_link_model()) {
    auto it = boundary_vector.find(name);
    require(it != boundary_vector.end(), Errc::argument, "unknown boundary state: " + name);
    return it->second;
  }
  auto it = boundary_index.find(name);
  require(it != boundary_index.end(), Errc::argument, "unknown boundary state: " + name);
  std::vector<double> w(static_cast<std::size_t>(q));
  for (std::int64_t s = 0; s < q; ++s) w[s] = link[s * q + it->second];
  return w;
}

namespace {

// Integer exponent tables k~ from the Weingarten pairings; Wlink = D^{-k~/2}.
constexpr int kOrth[10][10] = {
    {0, 1, 1, 1, 1, 1, 1, 2, 2, 2},
    {1, 0, 2, 2, 2, 2, 2, 1, 3, 3},
    {1, 2, 0, 2, 2, 2, 2, 1, 3, 3},
    {1, 2, 2, 0, 2, 2, 2, 3, 1, 3},
    {1, 2, 2, 2, 0, 2, 2, 3, 1, 3},
    {1, 2, 2, 2, 2, 0, 2, 3, 3, 1},
    {1, 2, 2, 2, 2, 2, 0, 3, 3, 1},
    {2, 1, 1, 3, 3, 3, 3, 0, 2, 2},
    {2, 3, 3, 1, 1, 3, 3, 2, 0, 2},
    {2, 3, 3, 3, 3, 1, 1, 2, 2, 0},
};

constexpr int kUnit[7][7] = {
    {0, 1, 1, 1, 1, 2, 2},
    {1, 0, 2, 2, 2, 1, 3},
    {1, 2, 0, 2, 2, 1, 3},
    {1, 2, 2, 0, 2, 3, 1},
    {1, 2, 2, 2, 0, 3, 1},
    {2, 1, 1, 3, 3, 0, 2},
    {2, 3, 3, 1, 1, 2, 0},
};

std::vector<double> link_from_exponents(const int* kt, std::int64_t q, std::int64_t D) {
  std::vector<double> w(static_cast<std::size_t>(q * q));
  for (std::int64_t i = 0; i < q * q; ++i)
    w[static_cast<std::size_t>(i)] = std::pow(double(D), -0.5 * kt[i]);
  return w;
}

}  // namespace

StatmechModel build_orthogonal_model(std::int64_t D, double lambda) {
  require(D >= 2, Errc::argument, "orthogonal model needs D >= 2");
  require(lambda >= 0.0, Errc::argument, "lambda must be >= 0");
  StatmechModel m;
  m.kind = StatmechKind::Orthogonal10;
  m.D = D;
  m.lambda = lambda;
  m.q = 10;
  const double mu = lambda * double(D);
  const double d4 = std::pow(double(D), 4.0);
  m.onsite = {std::pow(mu, 4.0), mu * mu, mu * mu, mu * mu, mu * mu, mu * mu, mu * mu,
              d4 / (d4 + 2.0), d4 / (d4 + 2.0), d4 / (d4 + 2.0)};
  m.link = link_from_exponents(&kOrth[0][0], 10, D);
  m.state_labels = {"1",        "(12)",     "(34)",     "(13)",    "(24)",
                    "(14)",     "(23)",     "(12)(34)", "(13)(24)", "(14)(23)"};
  m.boundary_index = {{"B", 7}, {"C", 8}, {"A", 9}};
  return m;
}

StatmechModel build_unitary_model(std::int64_t D, double lambda) {
  require(D >= 2, Errc::argument, "unitary model needs D >= 2");
  require(lambda >= 0.0, Errc::argument, "lambda must be >= 0");
  StatmechModel m;
  m.kind = StatmechKind::Unitary7;
  m.D = D;
  m.lambda = lambda;
  m.q = 7;
  const double mu = lambda * double(D);
  const double d4 = std::pow(double(D), 4.0);
  m.onsite = {std::pow(mu, 4.0), mu * mu, mu * mu, mu * mu, mu * mu,
              d4 / (d4 + 1.0),   d4 / (d4 + 1.0)};
  m.link = link_from_exponents(&kUnit[0][0], 7, D);
  m.state_labels = {"1", "(12)", "(34)", "(14)", "(23)", "(12)(34)", "(14)(23)"};
  m.boundary_index = {{"B", 5}, {"A", 6}};
  return m;
}

StatmechModel build_rank1_link_model(std::int64_t D, double lambda) {
  require(D >= 2, Errc::argument, "rank-1 link model needs D >= 2");
  require(lambda >= 0.0, Errc::argument, "lambda must be >= 0");
  StatmechModel m;
  m.kind = StatmechKind::Rank1Link;
  m.D = D;
  m.lambda = lambda;
  m.q = 2;
  m.state_labels = {"0", "1"};

  const double Dd = double(D);
  const double d4 = std::pow(Dd, 4.0);
  // unrescaled unitary vertex term Vtilde = (lambda^4; lambda^2 x4; D^4/(D^4+1) x2)
  std::array<double, 7> vt{std::pow(lambda, 4.0), lambda * lambda, lambda * lambda,
                           lambda * lambda,       lambda * lambda, d4 / (d4 + 1.0),
                           d4 / (d4 + 1.0)};
  // Q = (D^4; D^3 x4; D^2 x2); Wtilde(s,t) = sqrt(Q(s)) D^{-k/2} sqrt(Q(t))
  std::array<double, 7> q_weights{std::pow(Dd, 4.0), std::pow(Dd, 3.0), std::pow(Dd, 3.0),
                                  std::pow(Dd, 3.0), std::pow(Dd, 3.0), Dd * Dd, Dd * Dd};
  // columns of Wtilde at the two pair states (12)(34), (14)(23)
  std::array<std::array<double, 2>, 7> wy;
  for (int s = 0; s < 7; ++s)
    for (int t = 0; t < 2; ++t)
      wy[s][t] = std::sqrt(q_weights[s]) * std::pow(Dd, -0.5 * kUnit[s][5 + t]) *
                 std::sqrt(q_weights[5 + t]);

  // Y = [[1, -1/D], [-1/D, 1]] / (D^2 - 1); R its positive square root.
  // Eigenvectors (1,1)/sqrt2 and (1,-1)/sqrt2 give the closed form below.
  const double ev_plus = (1.0 - 1.0 / Dd) / (Dd * Dd - 1.0);   // eigvec (1,1)
  const double ev_minus = (1.0 + 1.0 / Dd) / (Dd * Dd - 1.0);  // eigvec (1,-1)
  const double sp = std::sqrt(ev_plus), sm = std::sqrt(ev_minus);
  const double r_diag = 0.5 * (sp + sm);
  const double r_off = 0.5 * (sp - sm);

  // M(s, i) = sum_t Wtilde_Y(s, t) R(t, i)
  std::array<std::array<double, 2>, 7> M;
  for (int s = 0; s < 7; ++s) {
    M[s][0] = wy[s][0] * r_diag + wy[s][1] * r_off;
    M[s][1] = wy[s][0] * r_off + wy[s][1] * r_diag;
  }
  // w(n) from the canonical index pattern with n ones. Products and sums are
  // grouped symmetrically under the swap (12)(34) <-> (14)(23) (which maps
  // M[.][0] <-> M[.][1] and permutes the basis as 1<->3, 2<->4, 5<->6), so
  // w(0) = w(4) and w(1) = w(3) hold bitwise.
  auto leg_product = [](int n, double a, double b) {
    // a = weight of link value 0, b of link value 1
    switch (n) {
      case 0: return ((a * a) * a) * a;
      case 1: return ((a * a) * a) * b;
      case 2: return (a * a) * (b * b);
      case 3: return ((b * b) * b) * a;
      default: return ((b * b) * b) * b;
    }
  };
  m.vertex_w.assign(5, 0.0);
  for (int n = 0; n <= 4; ++n) {
    auto term = [&](int s) { return vt[s] * leg_product(n, M[s][0], M[s][1]); };
    double acc = term(0) + ((term(1) + term(3)) + (term(2) + term(4))) +
                 (term(5) + term(6));
    m.vertex_w[static_cast<std::size_t>(n)] = acc / d4;
  }
  // boundary states: R applied to the canonical basis vectors; index 0 is
  // the (12)(34) = B pairing, index 1 the (14)(23) = A pairing.
  m.boundary_vector["B"] = {r_diag, r_off};
  m.boundary_vector["A"] = {r_off, r_diag};
  return m;
}

namespace {

std::vector<std::array<int, 4>> s4_permutations() {
  std::vector<std::array<int, 4>> perms;
  std::array<int, 4> p{0, 1, 2, 3};
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return perms;
}

int cycle_count(const std::array<int, 4>& p) {
  std::array<bool, 4> seen{};
  int c = 0;
  for (int i = 0; i < 4; ++i) {
    if (seen[i]) continue;
    ++c;
    for (int j = i; !seen[j]; j = p[j]) seen[j] = true;
  }
  return c;
}

std::string s4_label(const std::array<int, 4>& p) {
  std::string s;
  for (int v : p) s += char('1' + v);
  return s;
}

}  // namespace

StatmechModel build_s4_model(std::int64_t D, std::int64_t d) {
  require(D >= 2, Errc::argument, "S4 model needs D >= 2");
  require(d >= 1, Errc::argument, "S4 model needs d >= 1");
  StatmechModel m;
  m.kind = StatmechKind::S4Peps;
  m.D = D;
  m.phys_d = d;
  m.q = 24;
  auto perms = s4_permutations();
  m.onsite.resize(24);
  m.link.resize(24 * 24);
  for (int a = 0; a < 24; ++a) {
    m.onsite[a] = std::pow(double(d), cycle_count(perms[a]));
    m.state_labels.push_back(s4_label(perms[a]));
    for (int b = 0; b < 24; ++b) {
      // cycles of pa * pb^-1
      std::array<int, 4> inv{}, comp{};
      for (int i = 0; i < 4; ++i) inv[perms[b][i]] = i;
      for (int i = 0; i < 4; ++i) comp[i] = perms[a][inv[i]];
      m.link[a * 24 + b] = std::pow(double(D), cycle_count(comp));
    }
  }
  auto find_perm = [&](std::array<int, 4> p) {
    for (int i = 0; i < 24; ++i)
      if (perms[i] == p) return static_cast<std::int64_t>(i);
    fail(Errc::internal, "permutation not found");
  };
  m.boundary_index["B"] = find_perm({1, 0, 3, 2});  // (12)(34)
  m.boundary_index["A"] = find_perm({3, 2, 1, 0});  // (14)(23)
  return m;
}

namespace {

// Transfer over rows for the vertex models; state space q^W.
double log_z_vertex(const StatmechModel& m, std::int64_t W, std::int64_t H,
                    const std::vector<const std::vector<double>*>& bc_rows) {
  const std::int64_t q = m.q;
  std::int64_t nstates = 1;
  for (std::int64_t i = 0; i < W; ++i) nstates *= q;

  // per-state row weight without the boundary link: on-site and horizontal
  std::vector<double> roww(static_cast<std::size_t>(nstates), 1.0);
  std::vector<std::int64_t> digits(static_cast<std::size_t>(W));
  for (std::int64_t s = 0; s < nstates; ++s) {
    std::int64_t x = s;
    for (std::int64_t c = W - 1; c >= 0; --c) {
      digits[c] = x % q;
      x /= q;
    }
    double w = 1.0;
    for (std::int64_t c = 0; c < W; ++c) w *= m.onsite[digits[c]];
    for (std::int64_t c = 0; c + 1 < W; ++c) w *= m.link[digits[c] * q + digits[c + 1]];
    roww[s] = w;
  }
  // boundary factors: weight of the rightmost spin against the bc vector
  auto row_weights = [&](const std::vector<double>& bvec) {
    std::vector<double> out(roww);
    for (std::int64_t s = 0; s < nstates; ++s)
      out[s] *= bvec[static_cast<std::size_t>(s % q)];
    return out;
  };

  std::vector<double> v;
  double log_acc = 0.0;
  std::vector<double> tmp(static_cast<std::size_t>(nstates));
  for (std::int64_t r = 0; r < H; ++r) {
    std::vector<double> w = row_weights(*bc_rows[r]);
    if (r == 0) {
      v = std::move(w);
    } else {
      // vertical links: contract every column axis with the link matrix
      for (std::int64_t c = 0; c < W; ++c) {
        std::int64_t post = 1;
        for (std::int64_t i = c + 1; i < W; ++i) post *= q;
        std::int64_t pre = nstates / (q * post);
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (std::int64_t p = 0; p < pre; ++p)
          for (std::int64_t a = 0; a < q; ++a)
            for (std::int64_t b = 0; b < q; ++b) {
              double lw = m.link[a * q + b];
              const double* src = v.data() + (p * q + a) * post;
              double* dst = tmp.data() + (p * q + b) * post;
              for (std::int64_t t = 0; t < post; ++t) dst[t] += lw * src[t];
            }
        v.swap(tmp);
      }
      for (std::int64_t s = 0; s < nstates; ++s) v[s] *= w[s];
    }
    double mx = *std::max_element(v.begin(), v.end());
    require(mx > 0.0, Errc::internal, "partition function vanished");
    for (auto& x : v) x /= mx;
    log_acc += std::log(mx);
  }
  double z = std::accumulate(v.begin(), v.end(), 0.0);
  return log_acc + std::log(z);
}

// Rank-1 link model: row transfer over the 2^W vertical-link configuration;
// dangling left/top/bottom links are closed with all-ones, the right link
// of each row is fixed to the row's boundary vector.
double log_z_link(const StatmechModel& m, std::int64_t W, std::int64_t H,
                  const std::vector<const std::vector<double>*>& bc_rows) {
  const std::int64_t nstates = std::int64_t(1) << W;
  auto w4 = [&](int i, int j, int k, int l) { return m.vertex_w[i + j + k + l]; };

  // row operator R[top, bottom] for a given right-edge boundary vector;
  // the bit at position W-1-c of a config is column c's vertical link
  auto row_operator = [&](const std::vector<double>& bvec) {
    std::vector<double> R(static_cast<std::size_t>(nstates * nstates));
    for (std::int64_t top = 0; top < nstates; ++top)
      for (std::int64_t bot = 0; bot < nstates; ++bot) {
        auto tt = [&](std::int64_t c) { return int((top >> (W - 1 - c)) & 1); };
        auto bb = [&](std::int64_t c) { return int((bot >> (W - 1 - c)) & 1); };
        double val = 0.0;
        if (W == 1) {
          for (int l = 0; l < 2; ++l)
            for (int r = 0; r < 2; ++r)
              val += w4(l, r, tt(0), bb(0)) * bvec[static_cast<std::size_t>(r)];
        } else {
          // leftmost vertex: dangling left link summed with weight 1
          double vh[2];
          for (int h = 0; h < 2; ++h) {
            double s = 0.0;
            for (int l = 0; l < 2; ++l) s += w4(l, h, tt(0), bb(0));
            vh[h] = s;
          }
          for (std::int64_t c = 1; c + 1 < W; ++c) {
            double nh[2] = {0.0, 0.0};
            for (int h = 0; h < 2; ++h)
              for (int l = 0; l < 2; ++l) nh[h] += vh[l] * w4(l, h, tt(c), bb(c));
            vh[0] = nh[0];
            vh[1] = nh[1];
          }
          for (int l = 0; l < 2; ++l)
            for (int r = 0; r < 2; ++r)
              val += vh[l] * w4(l, r, tt(W - 1), bb(W - 1)) *
                     bvec[static_cast<std::size_t>(r)];
        }
        R[static_cast<std::size_t>(top * nstates + bot)] = val;
      }
    return R;
  };

  std::vector<double> v(static_cast<std::size_t>(nstates), 0.0);
  double log_acc = 0.0;
  for (std::int64_t r = 0; r < H; ++r) {
    auto R = row_operator(*bc_rows[r]);
    std::vector<double> nv(static_cast<std::size_t>(nstates), 0.0);
    if (r == 0) {
      // dangling top links: all-ones closure
      for (std::int64_t t = 0; t < nstates; ++t)
        for (std::int64_t b = 0; b < nstates; ++b)
          nv[b] += R[static_cast<std::size_t>(t * nstates + b)];
    } else {
      for (std::int64_t t = 0; t < nstates; ++t)
        for (std::int64_t b = 0; b < nstates; ++b)
          nv[b] += v[t] * R[static_cast<std::size_t>(t * nstates + b)];
    }
    v.swap(nv);
    double mx = *std::max_element(v.begin(), v.end());
    require(mx > 0.0, Errc::internal, "partition function vanished");
    for (auto& x : v) x /= mx;
    log_acc += std::log(mx);
  }
  double z = std::accumulate(v.begin(), v.end(), 0.0);
  return log_acc + std::log(z);
}

}  // namespace

TwistedRatio predicted_entropy(const StatmechModel& model, std::int64_t W, std::int64_t H,
                               const std::string& bc_top, const std::string& bc_bottom) {
  require(W >= 1 && H >= 2, Errc::argument, "need W >= 1 and H >= 2");
  double states = std::pow(double(model.is_link_model() ? 2 : model.q), double(W));
  require(states <= 2e5, Errc::size_guard, "statmech transfer guard exceeded: q^W > 2e5");

  std::vector<double> top = model.boundary_weights(bc_top);
  std::vector<double> bottom = model.boundary_weights(bc_bottom);
  const std::int64_t half = H / 2;
  std::vector<const std::vector<double>*> twisted, uniform;
  for (std::int64_t r = 0; r < H; ++r) {
    twisted.push_back(r < half ? &bottom : &top);
    uniform.push_back(&top);
  }
  TwistedRatio out;
  out.W = W;
  out.H = H;
  if (model.is_link_model()) {
    out.log_Z_twisted = log_z_link(model, W, H, twisted);
    out.log_Z_uniform = log_z_link(model, W, H, uniform);
  } else {
    out.log_Z_twisted = log_z_vertex(model, W, H, twisted);
    out.log_Z_uniform = log_z_vertex(model, W, H, uniform);
  }
  out.predicted_s2 = -(out.log_Z_twisted - out.log_Z_uniform);
  return out;
}

std::vector<PhasePoint> phase_scan(StatmechKind kind, const std::vector<std::int64_t>& Ds,
                                   const std::vector<double>& mus,
                                   const std::vector<std::int64_t>& Ws,
                                   std::int64_t h_factor) {
  require(!Ds.empty() && !mus.empty() && Ws.size() >= 2, Errc::argument,
          "phase scan needs nonempty grids and >= 2 widths");
  std::vector<PhasePoint> out;
  for (auto D : Ds)
    for (double mu : mus) {
      PhasePoint p;
      p.kind = kind;
      p.D = D;
      p.mu = mu;
      p.Ws = Ws;
      for (auto W : Ws) {
        StatmechModel m;
        switch (kind) {
          case StatmechKind::Orthogonal10:
            m = build_orthogonal_model(D, mu / double(D));
            break;
          case StatmechKind::Unitary7:
            m = build_unitary_model(D, mu / double(D));
            break;
          case StatmechKind::Rank1Link:
            m = build_rank1_link_model(D, mu / double(D));
            break;
          case StatmechKind::S4Peps:
            m = build_s4_model(D, std::max<std::int64_t>(1, std::llround(mu)));
            break;
        }
        p.s2_by_W.push_back(predicted_entropy(m, W, h_factor * W, "B", "A").predicted_s2);
      }
      // least-squares slope of s2 vs W
      double n = double(Ws.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < Ws.size(); ++i) {
        double x = double(Ws[i]);
        double y = p.s2_by_W[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      p.line_tension = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      out.push_back(std::move(p));
    }
  return out;
}

}  // namespace tnsign
