#include "tnsign/peps.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <limits>
#include <numeric>

#include "tnsign/linalg.hpp"
#include "tnsign/task_pool.hpp"

namespace tnsign {

namespace {

// (y legs..., z legs...) correlation tensor G = sum_i C^i (x) conj(C^i).
DenseTensor layer_correlation(const DenseTensor& c) {
  return contract_pair(c, {0}, c.conjugate(), {0});
}

DoubleLayerTensor double_layer_masked(const DenseTensor& c, const LegMask& legs,
                                      std::int64_t D, std::int64_t d) {
  const int k = c.rank() - 1;
  DenseTensor g = layer_correlation(c);  // (y1..yk, z1..zk)
  // interleave to (y1, z1, y2, z2, ...), then merge pairs into composite legs
  std::vector<int> perm;
  for (int i = 0; i < k; ++i) {
    perm.push_back(i);
    perm.push_back(k + i);
  }
  DenseTensor inter = g.permuted(perm);
  std::vector<std::int64_t> shape;
  for (int i = 0; i < k; ++i) shape.push_back(c.dim(i + 1) * c.dim(i + 1));
  DoubleLayerTensor out;
  out.a = inter.reshaped(std::move(shape));
  out.D = D;
  out.d = d;
  out.legs = legs;
  return out;
}

}  // namespace

DoubleLayerTensor double_layer(const DenseTensor& c) {
  require(c.rank() == 5, Errc::argument, "double_layer needs a (d, D, D, D, D) tensor");
  const std::int64_t D = c.dim(1);
  for (int i = 2; i < 5; ++i)
    require(c.dim(i) == D, Errc::dimension, "virtual legs must share one dimension");
  return double_layer_masked(c, LegMask{true, true, true, true}, D, c.dim(0));
}

DenseTensor double_layer_as_operator(const DoubleLayerTensor& a) {
  const int k = a.a.rank();
  // split composite legs back into (y, z) pairs, then group all y before all z
  std::vector<std::int64_t> split_shape;
  std::int64_t dv = 1;
  for (int i = 0; i < k; ++i) {
    std::int64_t leg = a.a.dim(i);
    auto root = static_cast<std::int64_t>(std::llround(std::sqrt(double(leg))));
    require(root * root == leg, Errc::internal, "composite leg is not a square");
    split_shape.push_back(root);
    split_shape.push_back(root);
    dv *= root;
  }
  DenseTensor s = a.a.reshaped(split_shape);
  std::vector<int> perm;
  for (int i = 0; i < k; ++i) perm.push_back(2 * i);
  for (int i = 0; i < k; ++i) perm.push_back(2 * i + 1);
  return s.permuted(perm).reshaped({dv, dv});
}

double double_layer_trace(const DoubleLayerTensor& a) {
  DenseTensor op = double_layer_as_operator(a);
  const std::int64_t n = op.dim(0);
  cx tr = 0.0;
  for (std::int64_t i = 0; i < n; ++i) tr += op.at(i * n + i);
  return tr.real();
}

Grouping site_grouping(std::int64_t row, std::int64_t col) {
  return ((row + col) % 2 == 0) ? Grouping::LeftDown_vs_UpRight
                                : Grouping::RightDown_vs_LeftUp;
}

namespace {

// Composite leg dims padded to (l, r, u, d).
std::array<std::int64_t, 4> composite_dims(const DoubleLayerTensor& a) {
  std::array<std::int64_t, 4> dims{1, 1, 1, 1};
  int pos = 0;
  if (a.legs.left) dims[0] = a.a.dim(pos++);
  if (a.legs.right) dims[1] = a.a.dim(pos++);
  if (a.legs.up) dims[2] = a.a.dim(pos++);
  if (a.legs.down) dims[3] = a.a.dim(pos++);
  return dims;
}

// Pair leg order per grouping: pair A then pair B.
std::array<int, 4> grouping_leg_order(Grouping g) {
  // indices into (l, r, u, d)
  if (g == Grouping::LeftDown_vs_UpRight) return {0, 3, 2, 1};  // (l,d | u,r)
  return {1, 3, 0, 2};                                          // (r,d | l,u)
}

}  // namespace

DenseTensor rho_from_grouping(const DoubleLayerTensor& a, Grouping g) {
  auto dims = composite_dims(a);
  // pad to 4 composite legs, split into (y, z) per leg
  DenseTensor padded = a.a.reshaped({dims[0], dims[1], dims[2], dims[3]});
  std::vector<std::int64_t> split;
  std::array<std::int64_t, 4> ydim{};
  for (int i = 0; i < 4; ++i) {
    auto root = static_cast<std::int64_t>(std::llround(std::sqrt(double(dims[i]))));
    require(root * root == dims[i], Errc::internal, "composite leg is not a square");
    ydim[i] = root;
    split.push_back(root);
    split.push_back(root);
  }
  DenseTensor s = padded.reshaped(split);  // (y_l, z_l, y_r, z_r, y_u, z_u, y_d, z_d)
  auto order = grouping_leg_order(g);
  std::vector<int> perm;
  for (int i = 0; i < 4; ++i) perm.push_back(2 * order[i]);      // y legs, grouped
  for (int i = 0; i < 4; ++i) perm.push_back(2 * order[i] + 1);  // z legs, grouped
  std::int64_t n = ydim[0] * ydim[1] * ydim[2] * ydim[3];
  DenseTensor rho = s.permuted(perm).reshaped({n, n});
  // trace-normalize
  cx tr = 0.0;
  for (std::int64_t i = 0; i < n; ++i) tr += rho.at(i * n + i);
  require(std::abs(tr) > 0.0, Errc::argument, "double layer has zero trace");
  return rho.scaled(cx(1.0) / tr);
}

namespace {

// Orthonormal Hermitian basis (generalized Gell-Mann plus normalized identity).
std::vector<DenseTensor> hermitian_basis(std::int64_t n) {
  std::vector<DenseTensor> basis;
  basis.push_back(DenseTensor::identity(n, Field::Complex).scaled(cx(1.0 / std::sqrt(double(n)))));
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t k = j + 1; k < n; ++k) {
      DenseTensor sym = DenseTensor::zeros({n, n}, Field::Complex);
      sym.cdata()[j * n + k] = cx(M_SQRT1_2);
      sym.cdata()[k * n + j] = cx(M_SQRT1_2);
      basis.push_back(sym);
      DenseTensor asym = DenseTensor::zeros({n, n}, Field::Complex);
      asym.cdata()[j * n + k] = cx(0.0, -M_SQRT1_2);
      asym.cdata()[k * n + j] = cx(0.0, M_SQRT1_2);
      basis.push_back(asym);
    }
  for (std::int64_t l = 1; l < n; ++l) {
    DenseTensor diag = DenseTensor::zeros({n, n}, Field::Complex);
    double norm = 1.0 / std::sqrt(double(l * (l + 1)));
    for (std::int64_t i = 0; i < l; ++i) diag.cdata()[i * n + i] = cx(norm);
    diag.cdata()[l * n + l] = cx(-double(l) * norm);
    basis.push_back(diag);
  }
  return basis;
}

double operator_norm_hermitian(const DenseTensor& m) {
  std::vector<double> vals;
  std::vector<cx> vecs;
  linalg::eigh_complex(m.dim(0), m.cdata().data(), vals, vecs);
  return std::max(std::abs(vals.front()), std::abs(vals.back()));
}

double matrix_trace_real(const DenseTensor& m) {
  const std::int64_t n = m.dim(0);
  cx tr = 0.0;
  for (std::int64_t i = 0; i < n; ++i) tr += m.at(i * n + i);
  return tr.real();
}

}  // namespace

std::variant<SeparableDecomposition, SeparableFailure> separable_decompose(
    const DenseTensor& rho, std::int64_t dim_a, std::int64_t dim_b) {
  require(rho.rank() == 2 && rho.dim(0) == dim_a * dim_b && rho.dim(1) == dim_a * dim_b,
          Errc::argument, "rho must be a (nA*nB) square matrix");
  DenseTensor r = rho.to_complex();
  const std::int64_t N = dim_a * dim_b;
  // Hermiticity and unit trace are preconditions
  {
    double herm_err = 0.0, scale = r.frob_norm() + 1e-300;
    cx tr = 0.0;
    auto data = r.cdata();
    for (std::int64_t i = 0; i < N; ++i) {
      tr += data[i * N + i];
      for (std::int64_t j = 0; j < N; ++j)
        herm_err = std::max(herm_err, std::abs(data[i * N + j] - std::conj(data[j * N + i])));
    }
    require(herm_err <= 1e-8 * scale, Errc::argument, "rho must be Hermitian");
    require(std::abs(tr - 1.0) <= 1e-8, Errc::argument, "rho must have unit trace");
  }

  auto basis_a = hermitian_basis(dim_a);
  auto basis_b = hermitian_basis(dim_b);
  const std::int64_t ma = static_cast<std::int64_t>(basis_a.size());
  const std::int64_t mb = static_cast<std::int64_t>(basis_b.size());

  // coefficient matrix c[j,k] = tr[rho (B_j (x) B_k)], real for Hermitian rho
  DenseTensor rho4 = r.reshaped({dim_a, dim_b, dim_a, dim_b});  // (ya, yb, za, zb)
  std::vector<double> coeff(static_cast<std::size_t>(ma * mb));
  for (std::int64_t j = 0; j < ma; ++j) {
    DenseTensor tj = contract_pair(rho4, {0, 2}, basis_a[j], {1, 0});  // (yb, zb)
    for (std::int64_t k = 0; k < mb; ++k) {
      DenseTensor v = contract_pair(tj, {0, 1}, basis_b[k], {1, 0});
      coeff[static_cast<std::size_t>(j * mb + k)] = v.at(0).real();
    }
  }
  const double budget = coeff[0] / std::sqrt(double(dim_a * dim_b));
  coeff[0] = 0.0;

  // real SVD of the traceless coefficient matrix: the adapted Hermitian
  // product basis for rho (operator Schmidt form)
  const std::int64_t kmax = std::min(ma, mb);
  std::vector<double> sigma(static_cast<std::size_t>(kmax));
  std::vector<double> u, vt;
  linalg::svd_real(ma, mb, coeff.data(), sigma.data(), u, vt);

  struct Direction {
    double s;
    DenseTensor A, B;
    double ga, gb;
  };
  std::vector<Direction> dirs;
  double mass = 0.0;
  for (std::int64_t t = 0; t < kmax; ++t) {
    if (sigma[t] <= 1e-14) break;
    DenseTensor A = DenseTensor::zeros({dim_a, dim_a}, Field::Complex);
    for (std::int64_t j = 0; j < ma; ++j)
      if (std::abs(u[j * kmax + t]) > 0)
        A = add(A, basis_a[j].scaled(u[j * kmax + t]));
    DenseTensor B = DenseTensor::zeros({dim_b, dim_b}, Field::Complex);
    for (std::int64_t k = 0; k < mb; ++k)
      if (std::abs(vt[t * mb + k]) > 0)
        B = add(B, basis_b[k].scaled(vt[t * mb + k]));
    Direction dir{sigma[t], std::move(A), std::move(B), 0.0, 0.0};
    dir.ga = operator_norm_hermitian(dir.A);
    dir.gb = operator_norm_hermitian(dir.B);
    mass += dir.s * dir.ga * dir.gb;
    dirs.push_back(std::move(dir));
  }

  if (mass > budget + 1e-14) {
    SeparableFailure f;
    f.offending_coefficient = budget - mass;
    f.required_mass = mass;
    f.available_mass = budget;
    return f;
  }

  SeparableDecomposition dec;
  auto push_term = [&](double weight, DenseTensor fa, DenseTensor fb) {
    double ta = matrix_trace_real(fa);
    double tb = matrix_trace_real(fb);
    double p = weight * ta * tb;
    if (p <= 1e-15) return;  // zero factor, contributes nothing
    SeparableTerm term;
    term.p = p;
    term.sigma_a = fa.scaled(cx(1.0 / ta));
    term.sigma_b = fb.scaled(cx(1.0 / tb));
    dec.terms.push_back(std::move(term));
  };

  for (const auto& dir : dirs) {
    DenseTensor ia = DenseTensor::identity(dim_a, Field::Complex).scaled(cx(dir.ga));
    DenseTensor ib = DenseTensor::identity(dim_b, Field::Complex).scaled(cx(dir.gb));
    push_term(dir.s / 2.0, add(dir.A, ia), add(dir.B, ib));
    push_term(dir.s / 2.0, add(ia, dir.A.scaled(-1.0)), add(ib, dir.B.scaled(-1.0)));
  }
  double remaining = budget - mass;
  if (remaining > 1e-16) {
    push_term(remaining,
              DenseTensor::identity(dim_a, Field::Complex),
              DenseTensor::identity(dim_b, Field::Complex));
  }
  return dec;
}

double separable_reconstruction_error(const SeparableDecomposition& dec,
                                      const DenseTensor& rho) {
  const std::int64_t na = dec.terms.empty() ? 0 : dec.terms.front().sigma_a.dim(0);
  const std::int64_t nb = dec.terms.empty() ? 0 : dec.terms.front().sigma_b.dim(0);
  require(na > 0, Errc::argument, "empty decomposition");
  DenseTensor acc = DenseTensor::zeros({na * nb, na * nb}, Field::Complex);
  for (const auto& term : dec.terms) {
    // kron(sigma_a, sigma_b) in the (ya yb), (za zb) layout
    DenseTensor k = contract_pair(term.sigma_a, std::span<const int>{}, term.sigma_b,
                                  std::span<const int>{});  // (ya, za, yb, zb)
    k = k.permuted(std::array<int, 4>{0, 2, 1, 3}).reshaped({na * nb, na * nb});
    acc = add(acc, k.scaled(term.p));
  }
  DenseTensor diff = add(acc, rho.to_complex().scaled(-1.0));
  return diff.frob_norm();
}

namespace {

struct FaceFactor {
  DenseTensor t;                   // (y1, y2, z1, z2)
  std::array<int, 2> bond_of_leg;  // face-local bond id of leg1, leg2
};

// Contract the factors sitting around one face; open dim-1 leg pairs at the
// lattice boundary are traced out.
double face_value(std::vector<FaceFactor> factors) {
  require(!factors.empty(), Errc::internal, "empty face");
  struct OpenPair {
    int bond;
    int y_pos, z_pos;
  };
  DenseTensor acc = factors[0].t;
  std::vector<OpenPair> open{{factors[0].bond_of_leg[0], 0, 2},
                             {factors[0].bond_of_leg[1], 1, 3}};
  for (std::size_t fi = 1; fi < factors.size(); ++fi) {
    const auto& f = factors[fi];
    std::vector<int> legs_acc, legs_f;
    std::vector<bool> used(open.size(), false);
    std::array<bool, 2> f_used{false, false};
    for (std::size_t oi = 0; oi < open.size(); ++oi)
      for (int leg = 0; leg < 2; ++leg)
        if (!f_used[leg] && open[oi].bond == f.bond_of_leg[leg]) {
          legs_acc.push_back(open[oi].y_pos);
          legs_f.push_back(leg);  // y position of this leg
          legs_acc.push_back(open[oi].z_pos);
          legs_f.push_back(leg + 2);
          used[oi] = true;
          f_used[leg] = true;
        }
    DenseTensor next = contract_pair(acc, legs_acc, f.t, legs_f);
    // rebuild the open list: remaining legs of acc keep relative order,
    // then the un-contracted legs of f
    std::vector<OpenPair> nopen;
    std::vector<int> remaining;
    for (std::size_t oi = 0; oi < open.size(); ++oi)
      if (!used[oi]) {
        remaining.push_back(open[oi].y_pos);
        remaining.push_back(open[oi].z_pos);
      }
    std::sort(remaining.begin(), remaining.end());
    auto new_pos = [&](int old_pos) {
      auto it = std::find(remaining.begin(), remaining.end(), old_pos);
      return static_cast<int>(it - remaining.begin());
    };
    for (std::size_t oi = 0; oi < open.size(); ++oi)
      if (!used[oi])
        nopen.push_back({open[oi].bond, new_pos(open[oi].y_pos), new_pos(open[oi].z_pos)});
    int base = static_cast<int>(remaining.size());
    std::vector<int> f_remaining;
    for (int leg = 0; leg < 2; ++leg)
      if (!f_used[leg]) {
        f_remaining.push_back(leg);
        f_remaining.push_back(leg + 2);
      }
    std::sort(f_remaining.begin(), f_remaining.end());
    for (int leg = 0; leg < 2; ++leg)
      if (!f_used[leg]) {
        auto fy = std::find(f_remaining.begin(), f_remaining.end(), leg);
        auto fz = std::find(f_remaining.begin(), f_remaining.end(), leg + 2);
        nopen.push_back({f.bond_of_leg[leg],
                         base + static_cast<int>(fy - f_remaining.begin()),
                         base + static_cast<int>(fz - f_remaining.begin())});
      }
    acc = std::move(next);
    open = std::move(nopen);
  }
  // trace out dangling pairs (dimension-1 boundary legs)
  while (!open.empty()) {
    OpenPair pr = open.back();
    open.pop_back();
    require(acc.dim(pr.y_pos) == 1 && acc.dim(pr.z_pos) == 1, Errc::internal,
            "unexpected open face bond");
    acc = trace_pair(acc, pr.y_pos, pr.z_pos);
    for (auto& o : open) {
      if (o.y_pos > std::max(pr.y_pos, pr.z_pos)) o.y_pos -= 2;
      else if (o.y_pos > std::min(pr.y_pos, pr.z_pos)) o.y_pos -= 1;
      if (o.z_pos > std::max(pr.y_pos, pr.z_pos)) o.z_pos -= 2;
      else if (o.z_pos > std::min(pr.y_pos, pr.z_pos)) o.z_pos -= 1;
    }
  }
  cx v = acc.at(0);
  return v.real();
}

struct FaceCorner {
  std::int64_t site;
  bool pair_a;  // which half of the decomposition this corner contributes
  std::array<int, 2> bond_of_leg;
};

// Active faces for the checkerboard tiling: top-left corners (fr, fc) with
// fr + fc odd, extended one step beyond the lattice.
std::vector<std::vector<FaceCorner>> face_table(std::int64_t rows, std::int64_t cols) {
  std::vector<std::vector<FaceCorner>> faces;
  for (std::int64_t fr = -1; fr < rows; ++fr)
    for (std::int64_t fc = -1; fc < cols; ++fc) {
      if (((fr + fc) % 2 + 2) % 2 != 1) continue;
      std::vector<FaceCorner> corners;
      auto in = [&](std::int64_t r, std::int64_t c) {
        return r >= 0 && r < rows && c >= 0 && c < cols;
      };
      // bond ids: 0 = top, 1 = left, 2 = right, 3 = bottom
      if (in(fr, fc)) corners.push_back({fr * cols + fc, true, {0, 1}});          // {r,d} of G2
      if (in(fr, fc + 1)) corners.push_back({fr * cols + fc + 1, true, {0, 2}});  // {l,d} of G1
      if (in(fr + 1, fc)) corners.push_back({(fr + 1) * cols + fc, false, {1, 3}});  // {u,r} of G1
      if (in(fr + 1, fc + 1))
        corners.push_back({(fr + 1) * cols + fc + 1, false, {3, 2}});  // {l,u} of G2
      if (!corners.empty()) faces.push_back(std::move(corners));
    }
  return faces;
}

// sigma as a 4-leg (y1, y2, z1, z2) tensor with the pair's two leg dims.
DenseTensor factor_as_tensor(const DenseTensor& sigma, std::int64_t d1, std::int64_t d2) {
  return sigma.reshaped({d1, d2, d1, d2});  // (y1 y2) x (z1 z2) -> (y1, y2, z1, z2)
}

}  // namespace

PositiveSumTerms positive_sum_estimate(const std::vector<DoubleLayerTensor>& sites,
                                       std::int64_t rows, std::int64_t cols,
                                       const std::vector<SeparableDecomposition>& decomps,
                                       std::int64_t samples, Rng& rng) {
  require(rows >= 2 && cols >= 2, Errc::argument, "need at least a 2x2 lattice");
  require(rows % 2 == 0 && cols % 2 == 0, Errc::argument,
          "positive-sum tiling needs an even x even lattice");
  require(sites.size() == static_cast<std::size_t>(rows * cols) &&
              decomps.size() == sites.size(),
          Errc::argument, "one decomposition per site required");
  require(samples >= 2, Errc::argument, "need at least 2 samples");

  // per-site: sampling table and the two pair-leg dims per half
  struct SiteData {
    std::vector<double> cum;  // cumulative p / P
    double total_p = 0.0;
    double trace = 1.0;
    std::vector<DenseTensor> fa, fb;  // factors as 4-leg tensors
  };
  std::vector<SiteData> data(sites.size());
  for (std::int64_t s = 0; s < rows * cols; ++s) {
    const auto& dl = sites[static_cast<std::size_t>(s)];
    const auto& dec = decomps[static_cast<std::size_t>(s)];
    require(dec.grouping == site_grouping(s / cols, s % cols), Errc::argument,
            "decomposition grouping does not match the checkerboard tiling");
    require(!dec.terms.empty(), Errc::argument, "empty decomposition");
    auto dims = composite_dims(dl);
    auto order = grouping_leg_order(dec.grouping);
    std::int64_t a1 = dims[order[0]], a2 = dims[order[1]];
    std::int64_t b1 = dims[order[2]], b2 = dims[order[3]];
    auto root = [](std::int64_t x) {
      return static_cast<std::int64_t>(std::llround(std::sqrt(double(x))));
    };
    SiteData& sd = data[static_cast<std::size_t>(s)];
    sd.trace = double_layer_trace(dl);
    double acc = 0.0;
    for (const auto& term : dec.terms) {
      acc += term.p;
      sd.cum.push_back(acc);
      sd.fa.push_back(factor_as_tensor(term.sigma_a, root(a1), root(a2)));
      sd.fb.push_back(factor_as_tensor(term.sigma_b, root(b1), root(b2)));
    }
    sd.total_p = acc;
    for (auto& c : sd.cum) c /= acc;
  }

  auto faces = face_table(rows, cols);

  PositiveSumTerms out;
  out.min_term = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (const auto& sd : data) scale *= sd.total_p * sd.trace;

  std::vector<std::int64_t> choice(sites.size());
  double sum = 0.0, sumsq = 0.0;
  std::int64_t nneg = 0;
  double sign_sum = 0.0;
  for (std::int64_t it = 0; it < samples; ++it) {
    for (std::size_t s = 0; s < sites.size(); ++s) {
      double urand = rng.uniform();
      const auto& cum = data[s].cum;
      choice[s] = static_cast<std::int64_t>(
          std::lower_bound(cum.begin(), cum.end(), urand) - cum.begin());
      if (choice[s] >= static_cast<std::int64_t>(cum.size()))
        choice[s] = static_cast<std::int64_t>(cum.size()) - 1;
    }
    double term = 1.0;
    for (const auto& face : faces) {
      std::vector<FaceFactor> factors;
      for (const auto& corner : face) {
        const auto& sd = data[static_cast<std::size_t>(corner.site)];
        std::int64_t i = choice[static_cast<std::size_t>(corner.site)];
        factors.push_back(
            {corner.pair_a ? sd.fa[static_cast<std::size_t>(i)]
                           : sd.fb[static_cast<std::size_t>(i)],
             corner.bond_of_leg});
      }
      double fv = face_value(std::move(factors));
      out.min_term = std::min(out.min_term, fv);
      term *= fv;
    }
    sum += term;
    sumsq += term * term;
    sign_sum += term >= 0.0 ? 1.0 : -1.0;
    if (term < 0.0) ++nneg;
  }
  double mean = sum / double(samples);
  double var = std::max(0.0, (sumsq - sum * sum / double(samples)) / double(samples - 1));
  out.estimate.mean = scale * mean;
  out.estimate.stderr_est = scale * std::sqrt(var / double(samples));
  out.estimate.samples = samples;
  out.negative_terms = nneg;
  out.average_sign = sign_sum / double(samples);
  return out;
}

LatticeNetwork sample_peps_norm_network(const PepsSpec& spec, std::int64_t rows,
                                        std::int64_t cols, bool open_right_edge) {
  require(rows >= 1 && cols >= 1, Errc::argument, "network must be non-empty");
  LatticeNetwork net;
  net.geometry = Geometry::OpenRect;
  net.rows = rows;
  net.cols = cols;
  net.bond_dim = spec.bond_dim * spec.bond_dim;
  net.open_right_edge = open_right_edge;
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) {
      LegMask m;
      m.left = c > 0;
      m.right = c < cols - 1 || open_right_edge;
      m.up = r > 0;
      m.down = r < rows - 1;
      Rng site_rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(r),
                                           static_cast<std::uint64_t>(c)}));
      DenseTensor cten = make_peps_site_tensor(spec, m, site_rng);
      net.masks.push_back(m);
      net.tensors.push_back(
          double_layer_masked(cten, m, spec.bond_dim, spec.phys_dim).a);
    }
  return net;
}

// Per-site double-layer tensors of a sampled norm network (same streams as
// sample_peps_norm_network).
std::vector<DoubleLayerTensor> sample_double_layer_sites(const PepsSpec& spec,
                                                         std::int64_t rows,
                                                         std::int64_t cols) {
  std::vector<DoubleLayerTensor> out;
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) {
      LegMask m;
      m.left = c > 0;
      m.right = c < cols - 1;
      m.up = r > 0;
      m.down = r < rows - 1;
      Rng site_rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(r),
                                           static_cast<std::uint64_t>(c)}));
      DenseTensor cten = make_peps_site_tensor(spec, m, site_rng);
      out.push_back(double_layer_masked(cten, m, spec.bond_dim, spec.phys_dim));
    }
  return out;
}

PepsEntropyResult peps_entropy_experiment(const PepsEntropySpec& spec) {
  require(!spec.Ds.empty() && !spec.ds.empty() && !spec.Ws.empty(), Errc::config,
          "peps entropy grids must be nonempty");
  PepsEntropyResult result;
  struct Point {
    std::int64_t D, d, W, H;
    std::uint64_t seed;
  };
  std::vector<Point> pts;
  for (auto D : spec.Ds)
    for (auto d : spec.ds)
      for (auto W : spec.Ws)
        pts.push_back({D, d, W, spec.h_factor * W,
                       derive_seed(spec.master_seed,
                                   {spec.experiment_tag, static_cast<std::uint64_t>(D),
                                    static_cast<std::uint64_t>(d),
                                    static_cast<std::uint64_t>(W)})});
  result.rows.resize(pts.size() * static_cast<std::size_t>(spec.trials));

  TaskPool pool(spec.workers);
  for (std::size_t pi = 0; pi < pts.size(); ++pi)
    for (std::int64_t t = 0; t < spec.trials; ++t)
      pool.submit([&, pi, t] {
        const auto t_start = std::chrono::steady_clock::now();
        const Point& p = pts[pi];
        std::uint64_t tseed = derive_seed(p.seed, {static_cast<std::uint64_t>(t)});
        PepsSpec ps;
        ps.bond_dim = p.D;
        ps.phys_dim = p.d;
        ps.seed = tseed;
        LatticeNetwork net = sample_peps_norm_network(ps, p.H, p.W, true);
        std::int64_t bond = p.D * p.D;
        std::int64_t chi = spec.chi;
        if (chi <= 0) {
          double full = std::pow(double(bond), double(p.W));
          chi = full > 256.0 ? 256 : static_cast<std::int64_t>(std::llround(full));
          chi = std::max(chi, bond);
        }
        BoundaryMps psi = boundary_mps_of_block(net, chi, spec.rel_tol);
        EntropyRecord rec = renyi_entropy(psi, p.H / 2, 2.0);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t_start)
                      .count();
        result.rows[pi * spec.trials + t] = PepsEntropyRow{
            p.D, p.d, p.W, p.H, t, rec.s2, psi.cumulative_truncation, tseed, ms};
      });
  pool.wait();

  // mean s2 per grid point, then fits
  auto mean_s2 = [&](std::int64_t D, std::int64_t d, std::int64_t W) {
    double sum = 0.0;
    std::int64_t n = 0;
    for (const auto& row : result.rows)
      if (row.D == D && row.d == d && row.W == W) {
        sum += row.s2;
        ++n;
      }
    return sum / double(n);
  };
  for (auto D : spec.Ds)
    for (auto d : spec.ds) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0, n = double(spec.Ws.size());
      for (auto W : spec.Ws) {
        double y = mean_s2(D, d, W);
        sx += double(W);
        sy += y;
        sxx += double(W) * double(W);
        sxy += double(W) * y;
      }
      result.fits.push_back({D, d, (n * sxy - sx * sy) / (n * sxx - sx * sx)});
    }
  for (auto D : spec.Ds) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = double(spec.ds.size());
    for (auto d : spec.ds) {
      double acc = 0.0;
      for (auto W : spec.Ws) acc += mean_s2(D, d, W);
      double y = std::log(std::max(acc / double(spec.Ws.size()), 1e-300));
      double x = std::log(double(d));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    result.alpha_by_D.push_back({D, -slope});
  }
  return result;
}

const char* gauge_mode_name(GaugeMode m) {
  switch (m) {
    case GaugeMode::Positivity: return "positivity";
    case GaugeMode::Hermiticity: return "hermiticity";
    case GaugeMode::Both: return "both";
  }
  return "?";
}

GaugeMode gauge_mode_from_name(const std::string& s) {
  if (s == "positivity") return GaugeMode::Positivity;
  if (s == "hermiticity") return GaugeMode::Hermiticity;
  if (s == "both") return GaugeMode::Both;
  fail(Errc::argument, "unknown gauge mode: " + s);
}

DenseTensor apply_gauge_to_tensor(const DenseTensor& t, const DenseTensor& X,
                                  const DenseTensor& Y) {
  require(t.rank() == 4, Errc::argument, "gauge acts on 4-leg tensors");
  DenseTensor Xinv, Yinv;
  if (X.is_complex())
    Xinv = DenseTensor::from_complex({X.dim(0), X.dim(1)},
                                     linalg::inverse_complex(X.dim(0), X.cdata().data()));
  else
    Xinv = DenseTensor::from_real({X.dim(0), X.dim(1)},
                                  linalg::inverse_real(X.dim(0), X.rdata().data()));
  if (Y.is_complex())
    Yinv = DenseTensor::from_complex({Y.dim(0), Y.dim(1)},
                                     linalg::inverse_complex(Y.dim(0), Y.cdata().data()));
  else
    Yinv = DenseTensor::from_real({Y.dim(0), Y.dim(1)},
                                  linalg::inverse_real(Y.dim(0), Y.rdata().data()));
  DenseTensor out = apply_to_leg(t, 0, Xinv, true);   // l
  out = apply_to_leg(out, 1, X, false);               // r
  out = apply_to_leg(out, 2, Yinv, true);             // u
  out = apply_to_leg(out, 3, Y, false);               // d
  return out;
}

double gauge_objective(const DenseTensor& t, GaugeMode mode) {
  double pos = 0.0;
  double abs_sum = t.abs_entry_sum();
  if (abs_sum > 0.0) pos = std::abs(t.entry_sum()) / abs_sum;
  if (mode == GaugeMode::Positivity) return pos;
  DenseTensor tm = trace_pair(t, 2, 3);  // vertical-traced transfer matrix (l, r)
  const std::int64_t n = tm.dim(0);
  double anti = 0.0, nrm = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      cx a = tm.at(i * n + j);
      cx b = std::conj(tm.at(j * n + i));
      anti += std::norm(a - b);
      nrm += std::norm(a);
    }
  double frac = std::sqrt(anti) / (2.0 * std::sqrt(nrm) + 1e-300);
  if (mode == GaugeMode::Hermiticity) return -frac;
  return pos - 0.5 * frac;
}

GaugeResult gauge_optimize(const DenseTensor& site, GaugeMode mode, std::int64_t iters,
                           Rng& rng, double step) {
  require(iters >= 1, Errc::argument, "iters must be >= 1");
  require(site.rank() == 4, Errc::argument, "gauge acts on 4-leg tensors");
  const std::int64_t m = site.dim(0);
  require(site.dim(1) == m, Errc::dimension, "horizontal legs must match");
  const std::int64_t nv = site.dim(2);
  require(site.dim(3) == nv, Errc::dimension, "vertical legs must match");
  const bool cplx = site.is_complex();
  Field f = cplx ? Field::Complex : Field::Real;

  GaugeResult res;
  res.gauge.X = DenseTensor::identity(m, f);
  res.gauge.Y = DenseTensor::identity(nv, f);
  res.transformed = site;
  double best = gauge_objective(site, mode);
  double cur_step = step;
  std::int64_t rejects = 0;

  auto perturb = [&](const DenseTensor& g) {
    const std::int64_t n = g.dim(0);
    DenseTensor delta = DenseTensor::zeros({n, n}, f);
    double sc = cur_step / std::sqrt(double(n));
    if (cplx)
      for (auto& z : delta.cdata()) z = sc * rng.normal_complex();
    else
      for (auto& x : delta.rdata()) x = sc * rng.normal();
    DenseTensor bump = add(DenseTensor::identity(n, f), delta);
    return contract_pair(g, {1}, bump, {0});
  };

  for (std::int64_t it = 0; it < iters; ++it) {
    bool move_x = (it % 2 == 0);
    DenseTensor gx = move_x ? perturb(res.gauge.X) : res.gauge.X;
    DenseTensor gy = move_x ? res.gauge.Y : perturb(res.gauge.Y);
    const DenseTensor& changed = move_x ? gx : gy;
    double cond = changed.is_complex()
                      ? linalg::cond_complex(changed.dim(0), changed.cdata().data())
                      : linalg::cond_real(changed.dim(0), changed.rdata().data());
    bool accepted = false;
    if (cond <= 1e6) {
      DenseTensor trial = apply_gauge_to_tensor(site, gx, gy);
      double obj = gauge_objective(trial, mode);
      if (obj > best) {
        best = obj;
        res.gauge.X = std::move(gx);
        res.gauge.Y = std::move(gy);
        res.transformed = std::move(trial);
        accepted = true;
      }
    }
    if (accepted) {
      rejects = 0;
      cur_step = std::min(cur_step * 1.1, step * 4.0);
    } else if (++rejects >= 20) {
      cur_step = std::max(cur_step * 0.7, 1e-4);
      rejects = 0;
    }
    res.gauge.objective_trace.push_back(best);
  }
  res.gauge.cond_x = res.gauge.X.is_complex()
                         ? linalg::cond_complex(m, res.gauge.X.cdata().data())
                         : linalg::cond_real(m, res.gauge.X.rdata().data());
  res.gauge.cond_y = res.gauge.Y.is_complex()
                         ? linalg::cond_complex(nv, res.gauge.Y.cdata().data())
                         : linalg::cond_real(nv, res.gauge.Y.rdata().data());
  return res;
}

}  // namespace tnsign
