#include "tnsign/dense_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "tnsign/linalg.hpp"

namespace tnsign {

static std::int64_t shape_numel(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (auto d : shape) {
    require(d > 0, Errc::argument, "tensor leg dimensions must be positive");
    n *= d;
  }
  return n;
}

DenseTensor DenseTensor::zeros(std::vector<std::int64_t> shape, Field field) {
  DenseTensor t;
  std::int64_t n = shape_numel(shape);
  t.shape_ = std::move(shape);
  t.field_ = field;
  if (field == Field::Real) {
    t.rdata_.assign(n, 0.0);
    t.cdata_.clear();
  } else {
    t.cdata_.assign(n, cx(0.0));
    t.rdata_.clear();
  }
  return t;
}

DenseTensor DenseTensor::filled(std::vector<std::int64_t> shape, double value) {
  DenseTensor t = zeros(std::move(shape), Field::Real);
  std::fill(t.rdata_.begin(), t.rdata_.end(), value);
  return t;
}

DenseTensor DenseTensor::from_real(std::vector<std::int64_t> shape, std::vector<double> data) {
  require(shape_numel(shape) == static_cast<std::int64_t>(data.size()), Errc::dimension,
          "entry count does not match shape");
  DenseTensor t;
  t.shape_ = std::move(shape);
  t.field_ = Field::Real;
  t.rdata_ = std::move(data);
  return t;
}

DenseTensor DenseTensor::from_complex(std::vector<std::int64_t> shape, std::vector<cx> data) {
  require(shape_numel(shape) == static_cast<std::int64_t>(data.size()), Errc::dimension,
          "entry count does not match shape");
  DenseTensor t;
  t.shape_ = std::move(shape);
  t.field_ = Field::Complex;
  t.cdata_ = std::move(data);
  return t;
}

DenseTensor DenseTensor::scalar(double v) { return from_real({}, {v}); }
DenseTensor DenseTensor::scalar(cx v) { return from_complex({}, {v}); }

DenseTensor DenseTensor::identity(std::int64_t n, Field field) {
  DenseTensor t = zeros({n, n}, field);
  for (std::int64_t i = 0; i < n; ++i) {
    if (field == Field::Real)
      t.rdata_[i * n + i] = 1.0;
    else
      t.cdata_[i * n + i] = 1.0;
  }
  return t;
}

std::int64_t DenseTensor::dim(int leg) const {
  require(leg >= 0 && leg < rank(), Errc::argument, "leg index out of range");
  return shape_[leg];
}

std::int64_t DenseTensor::size() const {
  return field_ == Field::Real ? static_cast<std::int64_t>(rdata_.size())
                               : static_cast<std::int64_t>(cdata_.size());
}

std::span<const double> DenseTensor::rdata() const {
  require(field_ == Field::Real, Errc::argument, "tensor is not real");
  return rdata_;
}
std::span<double> DenseTensor::rdata() {
  require(field_ == Field::Real, Errc::argument, "tensor is not real");
  return rdata_;
}
std::span<const cx> DenseTensor::cdata() const {
  require(field_ == Field::Complex, Errc::argument, "tensor is not complex");
  return cdata_;
}
std::span<cx> DenseTensor::cdata() {
  require(field_ == Field::Complex, Errc::argument, "tensor is not complex");
  return cdata_;
}

cx DenseTensor::at(std::int64_t flat) const {
  require(flat >= 0 && flat < size(), Errc::argument, "flat index out of range");
  return field_ == Field::Real ? cx(rdata_[flat]) : cdata_[flat];
}

cx DenseTensor::at(std::span<const std::int64_t> index) const {
  require(static_cast<int>(index.size()) == rank(), Errc::argument, "index rank mismatch");
  std::int64_t flat = 0;
  for (int i = 0; i < rank(); ++i) {
    require(index[i] >= 0 && index[i] < shape_[i], Errc::argument, "index out of range");
    flat = flat * shape_[i] + index[i];
  }
  return at(flat);
}

DenseTensor DenseTensor::to_complex() const {
  if (field_ == Field::Complex) return *this;
  DenseTensor t;
  t.shape_ = shape_;
  t.field_ = Field::Complex;
  t.cdata_.assign(rdata_.begin(), rdata_.end());
  return t;
}

DenseTensor DenseTensor::conjugate() const {
  if (field_ == Field::Real) return *this;
  DenseTensor t = *this;
  for (auto& z : t.cdata_) z = std::conj(z);
  return t;
}

DenseTensor DenseTensor::permuted(std::span<const int> perm) const {
  const int r = rank();
  require(static_cast<int>(perm.size()) == r, Errc::argument, "permutation rank mismatch");
  std::vector<bool> seen(r, false);
  for (int p : perm) {
    require(p >= 0 && p < r && !seen[p], Errc::argument, "invalid permutation");
    seen[p] = true;
  }
  std::vector<std::int64_t> new_shape(r);
  for (int i = 0; i < r; ++i) new_shape[i] = shape_[perm[i]];

  // strides of the source, walked in destination order
  std::vector<std::int64_t> src_stride(r, 1);
  for (int i = r - 2; i >= 0; --i) src_stride[i] = src_stride[i + 1] * shape_[i + 1];
  std::vector<std::int64_t> walk_stride(r);
  for (int i = 0; i < r; ++i) walk_stride[i] = src_stride[perm[i]];

  DenseTensor out = zeros(new_shape, field_);
  const std::int64_t n = size();
  std::vector<std::int64_t> idx(r, 0);
  std::int64_t src = 0;
  if (field_ == Field::Real) {
    for (std::int64_t dst = 0; dst < n; ++dst) {
      out.rdata_[dst] = rdata_[src];
      for (int ax = r - 1; ax >= 0; --ax) {
        src += walk_stride[ax];
        if (++idx[ax] < new_shape[ax]) break;
        src -= walk_stride[ax] * new_shape[ax];
        idx[ax] = 0;
      }
    }
  } else {
    for (std::int64_t dst = 0; dst < n; ++dst) {
      out.cdata_[dst] = cdata_[src];
      for (int ax = r - 1; ax >= 0; --ax) {
        src += walk_stride[ax];
        if (++idx[ax] < new_shape[ax]) break;
        src -= walk_stride[ax] * new_shape[ax];
        idx[ax] = 0;
      }
    }
  }
  return out;
}

DenseTensor DenseTensor::reshaped(std::vector<std::int64_t> new_shape) const {
  require(shape_numel(new_shape) == size(), Errc::dimension, "reshape changes entry count");
  DenseTensor t = *this;
  t.shape_ = std::move(new_shape);
  return t;
}

DenseTensor DenseTensor::scaled(cx alpha) const {
  if (alpha.imag() == 0.0 && field_ == Field::Real) return scaled(alpha.real());
  DenseTensor t = to_complex();
  for (auto& z : t.cdata_) z *= alpha;
  return t;
}

DenseTensor DenseTensor::scaled(double alpha) const {
  DenseTensor t = *this;
  if (field_ == Field::Real)
    for (auto& v : t.rdata_) v *= alpha;
  else
    for (auto& z : t.cdata_) z *= alpha;
  return t;
}

double DenseTensor::frob_norm() const {
  double s = 0.0;
  if (field_ == Field::Real)
    for (double v : rdata_) s += v * v;
  else
    for (const cx& z : cdata_) s += std::norm(z);
  return std::sqrt(s);
}

double DenseTensor::max_abs() const {
  double m = 0.0;
  if (field_ == Field::Real)
    for (double v : rdata_) m = std::max(m, std::abs(v));
  else
    for (const cx& z : cdata_) m = std::max(m, std::abs(z));
  return m;
}

cx DenseTensor::entry_sum() const {
  cx s = 0.0;
  if (field_ == Field::Real)
    for (double v : rdata_) s += v;
  else
    for (const cx& z : cdata_) s += z;
  return s;
}

double DenseTensor::abs_entry_sum() const {
  double s = 0.0;
  if (field_ == Field::Real)
    for (double v : rdata_) s += std::abs(v);
  else
    for (const cx& z : cdata_) s += std::abs(z);
  return s;
}

bool DenseTensor::all_finite() const {
  if (field_ == Field::Real) {
    for (double v : rdata_)
      if (!std::isfinite(v)) return false;
  } else {
    for (const cx& z : cdata_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

DenseTensor add(const DenseTensor& a, const DenseTensor& b) {
  require(a.shape_ == b.shape_, Errc::dimension, "add: shape mismatch");
  if (a.field_ == Field::Real && b.field_ == Field::Real) {
    DenseTensor t = a;
    for (std::size_t i = 0; i < t.rdata_.size(); ++i) t.rdata_[i] += b.rdata_[i];
    return t;
  }
  DenseTensor t = a.to_complex();
  DenseTensor bc = b.to_complex();
  for (std::size_t i = 0; i < t.cdata_.size(); ++i) t.cdata_[i] += bc.cdata_[i];
  return t;
}

namespace {

void check_leg_list(const DenseTensor& t, std::span<const int> legs, const char* who) {
  std::vector<bool> seen(t.rank(), false);
  for (int l : legs) {
    require(l >= 0 && l < t.rank(), Errc::argument, std::string(who) + ": leg index out of range");
    require(!seen[l], Errc::argument, std::string(who) + ": duplicate leg index");
    seen[l] = true;
  }
}

// Permutation putting `chosen` legs (in order) either first or last.
std::vector<int> split_perm(int rank, std::span<const int> chosen, bool chosen_first) {
  std::vector<bool> is_chosen(rank, false);
  for (int l : chosen) is_chosen[l] = true;
  std::vector<int> perm;
  perm.reserve(rank);
  if (chosen_first)
    for (int l : chosen) perm.push_back(l);
  for (int i = 0; i < rank; ++i)
    if (!is_chosen[i]) perm.push_back(i);
  if (!chosen_first)
    for (int l : chosen) perm.push_back(l);
  return perm;
}

}  // namespace

DenseTensor contract_pair(const DenseTensor& a, std::span<const int> legs_a,
                          const DenseTensor& b, std::span<const int> legs_b) {
  require(legs_a.size() == legs_b.size(), Errc::argument,
          "contract_pair: leg lists differ in length");
  check_leg_list(a, legs_a, "contract_pair");
  check_leg_list(b, legs_b, "contract_pair");
  for (std::size_t i = 0; i < legs_a.size(); ++i)
    require(a.dim(legs_a[i]) == b.dim(legs_b[i]), Errc::dimension,
            "contract_pair: paired legs have unequal dimensions");

  auto pa = split_perm(a.rank(), legs_a, /*chosen_first=*/false);
  auto pb = split_perm(b.rank(), legs_b, /*chosen_first=*/true);
  DenseTensor at = a.permuted(pa);
  DenseTensor bt = b.permuted(pb);

  std::int64_t k = 1;
  for (int l : legs_a) k *= a.dim(l);
  std::int64_t m = at.size() / k;
  std::int64_t n = bt.size() / k;

  std::vector<std::int64_t> out_shape;
  for (int i = 0; i < a.rank() - static_cast<int>(legs_a.size()); ++i)
    out_shape.push_back(at.shape()[i]);
  for (int i = static_cast<int>(legs_b.size()); i < b.rank(); ++i)
    out_shape.push_back(bt.shape()[i]);

  const bool complex_out = a.is_complex() || b.is_complex();
  if (!complex_out) {
    std::vector<double> out(static_cast<std::size_t>(m * n), 0.0);
    linalg::gemm_real(m, n, k, at.rdata().data(), bt.rdata().data(), out.data());
    return DenseTensor::from_real(std::move(out_shape), std::move(out));
  }
  DenseTensor ac = at.to_complex();
  DenseTensor bc = bt.to_complex();
  std::vector<cx> out(static_cast<std::size_t>(m * n), cx(0.0));
  linalg::gemm_complex(m, n, k, ac.cdata().data(), bc.cdata().data(), out.data());
  return DenseTensor::from_complex(std::move(out_shape), std::move(out));
}

DenseTensor contract_pair(const DenseTensor& a, std::initializer_list<int> legs_a,
                          const DenseTensor& b, std::initializer_list<int> legs_b) {
  return contract_pair(a, std::span<const int>(legs_a.begin(), legs_a.size()), b,
                       std::span<const int>(legs_b.begin(), legs_b.size()));
}

DenseTensor trace_pair(const DenseTensor& t, int leg_a, int leg_b) {
  require(leg_a != leg_b, Errc::argument, "trace_pair: legs must differ");
  check_leg_list(t, std::array<int, 2>{leg_a, leg_b}, "trace_pair");
  require(t.dim(leg_a) == t.dim(leg_b), Errc::dimension, "trace_pair: dimension mismatch");
  // move traced legs last, then sum the diagonal
  std::array<int, 2> traced{leg_a, leg_b};
  auto perm = split_perm(t.rank(), traced, /*chosen_first=*/false);
  DenseTensor tp = t.permuted(perm);
  const std::int64_t d = t.dim(leg_a);
  const std::int64_t outer = tp.size() / (d * d);
  std::vector<std::int64_t> out_shape(tp.shape().begin(), tp.shape().end() - 2);
  DenseTensor out = DenseTensor::zeros(out_shape, t.field());
  if (t.is_complex()) {
    auto src = tp.cdata();
    auto dst = out.cdata();
    for (std::int64_t o = 0; o < outer; ++o) {
      cx s = 0.0;
      for (std::int64_t i = 0; i < d; ++i) s += src[o * d * d + i * d + i];
      dst[o] = s;
    }
  } else {
    auto src = tp.rdata();
    auto dst = out.rdata();
    for (std::int64_t o = 0; o < outer; ++o) {
      double s = 0.0;
      for (std::int64_t i = 0; i < d; ++i) s += src[o * d * d + i * d + i];
      dst[o] = s;
    }
  }
  return out;
}

DenseTensor elementwise_abs(const DenseTensor& t) {
  std::vector<double> out(static_cast<std::size_t>(t.size()));
  if (t.is_complex()) {
    auto src = t.cdata();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(src[i]);
  } else {
    auto src = t.rdata();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(src[i]);
  }
  return DenseTensor::from_real(t.shape(), std::move(out));
}

SvdSplit svd_split(const DenseTensor& t, std::span<const int> left_legs,
                   std::int64_t chi, double rel_tol) {
  require(chi >= 1, Errc::argument, "svd_split: chi must be >= 1");
  require(rel_tol >= 0.0, Errc::argument, "svd_split: rel_tol must be >= 0");
  require(!left_legs.empty() && static_cast<int>(left_legs.size()) < t.rank(), Errc::argument,
          "svd_split: left legs must be a nonempty proper subset");
  check_leg_list(t, left_legs, "svd_split");

  auto perm = split_perm(t.rank(), left_legs, /*chosen_first=*/true);
  DenseTensor tp = t.permuted(perm);
  std::int64_t m = 1;
  for (int l : left_legs) m *= t.dim(l);
  std::int64_t n = tp.size() / m;
  const std::int64_t k0 = std::min(m, n);

  std::vector<double> sigma(k0);
  SvdSplit out;
  std::vector<std::int64_t> lshape(tp.shape().begin(), tp.shape().begin() + left_legs.size());
  std::vector<std::int64_t> rshape(tp.shape().begin() + left_legs.size(), tp.shape().end());

  auto finish = [&](auto&& u_take, auto&& vt_scale_take) {
    double total = 0.0;
    for (double s : sigma) total += s * s;
    std::int64_t kept = 0;
    for (std::int64_t i = 0; i < k0; ++i)
      if (sigma[i] * sigma[i] > rel_tol * total) ++kept;
    std::int64_t k = std::max<std::int64_t>(1, std::min(chi, kept));
    double discarded = 0.0;
    for (std::int64_t i = k; i < k0; ++i) discarded += sigma[i] * sigma[i];
    out.kept_spectrum.assign(sigma.begin(), sigma.begin() + k);
    out.discarded_weight = discarded;
    lshape.push_back(k);
    rshape.insert(rshape.begin(), k);
    u_take(k);
    vt_scale_take(k);
  };

  if (!t.is_complex()) {
    std::vector<double> u, vt;
    linalg::svd_real(m, n, tp.rdata().data(), sigma.data(), u, vt);
    finish(
        [&](std::int64_t k) {
          std::vector<double> ldata(static_cast<std::size_t>(m * k));
          for (std::int64_t i = 0; i < m; ++i)
            for (std::int64_t j = 0; j < k; ++j) ldata[i * k + j] = u[i * k0 + j];
          out.left = DenseTensor::from_real(lshape, std::move(ldata));
        },
        [&](std::int64_t k) {
          std::vector<double> rdat(static_cast<std::size_t>(k * n));
          for (std::int64_t i = 0; i < k; ++i)
            for (std::int64_t j = 0; j < n; ++j) rdat[i * n + j] = sigma[i] * vt[i * n + j];
          out.right = DenseTensor::from_real(rshape, std::move(rdat));
        });
  } else {
    std::vector<cx> u, vt;
    linalg::svd_complex(m, n, tp.cdata().data(), sigma.data(), u, vt);
    finish(
        [&](std::int64_t k) {
          std::vector<cx> ldata(static_cast<std::size_t>(m * k));
          for (std::int64_t i = 0; i < m; ++i)
            for (std::int64_t j = 0; j < k; ++j) ldata[i * k + j] = u[i * k0 + j];
          out.left = DenseTensor::from_complex(lshape, std::move(ldata));
        },
        [&](std::int64_t k) {
          std::vector<cx> rdat(static_cast<std::size_t>(k * n));
          for (std::int64_t i = 0; i < k; ++i)
            for (std::int64_t j = 0; j < n; ++j) rdat[i * n + j] = sigma[i] * vt[i * n + j];
          out.right = DenseTensor::from_complex(rshape, std::move(rdat));
        });
  }
  return out;
}

SvdSplit svd_split(const DenseTensor& t, std::initializer_list<int> left_legs,
                   std::int64_t chi, double rel_tol) {
  return svd_split(t, std::span<const int>(left_legs.begin(), left_legs.size()), chi, rel_tol);
}

DenseTensor apply_to_leg(const DenseTensor& t, int leg, const DenseTensor& m,
                         bool transpose_m) {
  require(m.rank() == 2, Errc::argument, "apply_to_leg: m must be a matrix");
  const int mleg = transpose_m ? 1 : 0;
  DenseTensor r = contract_pair(t, {leg}, m, {mleg});
  // contracted result has the new leg last; rotate it back into position
  std::vector<int> perm;
  perm.reserve(t.rank());
  int src = 0;
  for (int i = 0; i < t.rank(); ++i) {
    if (i == leg)
      perm.push_back(t.rank() - 1);
    else
      perm.push_back(src++);
  }
  return r.permuted(perm);
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ok: return "ok";
    case Errc::argument: return "argument";
    case Errc::dimension: return "dimension";
    case Errc::size_guard: return "size_guard";
    case Errc::config: return "config";
    case Errc::format: return "format";
    case Errc::io: return "io";
    case Errc::internal: return "internal";
  }
  return "unknown";
}

}  // namespace tnsign
