#pragma once

// Internal column-transfer kernels shared by transfer_value and the
// delta-f cylinder sweeps. Frontier layouts:
//   open rectangle: [emitted r-legs][vertical bond][pending l-legs]
//   cylinder:       [wrap][emitted r-legs][vertical bond][pending l-legs]

#include <cmath>
#include <span>
#include <type_traits>
#include <vector>

#include "tnsign/dense_tensor.hpp"
#include "tnsign/ensembles.hpp"
#include "tnsign/linalg.hpp"

namespace tnsign::detail {

inline DenseTensor as_padded4(const DenseTensor& t, const LegMask& m, std::int64_t D) {
  std::vector<std::int64_t> shape{m.left ? D : 1, m.right ? D : 1, m.up ? D : 1,
                                  m.down ? D : 1};
  return t.reshaped(std::move(shape));
}

struct Padded4 {
  std::int64_t dl, dr, du, dd;
};

inline Padded4 padded_dims(const LegMask& m, std::int64_t D) {
  return {m.left ? D : 1, m.right ? D : 1, m.up ? D : 1, m.down ? D : 1};
}

// Site tensor as a flat (u l) x (r d) matrix.
template <typename T>
std::vector<T> site_matrix(const DenseTensor& t4) {
  static const int perm[4] = {2, 0, 1, 3};  // (l,r,u,d) -> (u,l,r,d)
  DenseTensor p = t4.permuted(perm);
  if constexpr (std::is_same_v<T, cx>) {
    p = p.to_complex();
    auto d = p.cdata();
    return {d.begin(), d.end()};
  } else {
    auto d = p.rdata();
    return {d.begin(), d.end()};
  }
}

template <typename T>
double vec_norm(const std::vector<T>& v) {
  double s = 0.0;
  for (const auto& x : v) {
    if constexpr (std::is_same_v<T, cx>)
      s += std::norm(x);
    else
      s += x * x;
  }
  return std::sqrt(s);
}

// out[p, K', q] = sum_K M[K', K] * in[p, K, q]
template <typename T>
void absorb_block(const std::vector<T>& in, std::int64_t P, std::int64_t K,
                  std::int64_t Q, const std::vector<T>& m, std::int64_t Kp,
                  std::vector<T>& out) {
  out.assign(static_cast<std::size_t>(P * Kp * Q), T(0));
  for (std::int64_t p = 0; p < P; ++p) {
    const T* src = in.data() + p * K * Q;
    T* dst = out.data() + p * Kp * Q;
    if constexpr (std::is_same_v<T, cx>)
      linalg::gemm_complex(Kp, Q, K, m.data(), src, dst);
    else
      linalg::gemm_real(Kp, Q, K, m.data(), src, dst);
  }
}

template <typename T>
struct TransferState {
  std::vector<T> v{T(1)};
  double log_accum = 0.0;
  bool zero = false;

  // Returns the norm factored out.
  double rescale() {
    double n = vec_norm(v);
    if (n == 0.0 || !std::isfinite(n)) {
      zero = true;
      return 0.0;
    }
    double inv = 1.0 / n;
    for (auto& x : v) x *= inv;
    log_accum += std::log(n);
    return n;
  }
};

template <typename T>
void apply_open_column(TransferState<T>& st, std::span<const DenseTensor> col,
                       std::span<const LegMask> masks, std::int64_t D) {
  const std::int64_t rows = static_cast<std::int64_t>(col.size());
  std::vector<Padded4> dims;
  for (std::int64_t r = 0; r < rows; ++r) dims.push_back(padded_dims(masks[r], D));
  std::int64_t P = 1, vb = 1, Q = 1;
  for (const auto& d : dims) Q *= d.dl;
  std::vector<T> next;
  for (std::int64_t r = 0; r < rows; ++r) {
    const auto& d = dims[r];
    Q /= d.dl;
    auto m = site_matrix<T>(as_padded4(col[r], masks[r], D));
    const std::int64_t K = d.du * d.dl, Kp = d.dr * d.dd;
    std::vector<T> mt(m.size());
    for (std::int64_t i = 0; i < K; ++i)
      for (std::int64_t j = 0; j < Kp; ++j) mt[j * K + i] = m[i * Kp + j];
    absorb_block(st.v, P, vb * d.dl, Q, mt, Kp, next);
    st.v.swap(next);
    P *= d.dr;
    vb = d.dd;
  }
}

template <typename T>
void apply_cylinder_column(TransferState<T>& st, std::span<const DenseTensor> col,
                           std::span<const LegMask> masks, std::int64_t D) {
  const std::int64_t rows = static_cast<std::int64_t>(col.size());
  std::vector<Padded4> dims;
  for (std::int64_t r = 0; r < rows; ++r) dims.push_back(padded_dims(masks[r], D));
  std::int64_t Q = 1;
  for (const auto& d : dims) Q *= d.dl;
  std::vector<T> next;

  {
    const auto& d = dims[0];
    Q /= d.dl;
    auto m = site_matrix<T>(as_padded4(col[0], masks[0], D));
    std::vector<T> mt(m.size());
    for (std::int64_t u = 0; u < d.du; ++u)
      for (std::int64_t l = 0; l < d.dl; ++l)
        for (std::int64_t rd = 0; rd < d.dr * d.dd; ++rd)
          mt[(u * d.dr * d.dd + rd) * d.dl + l] = m[(u * d.dl + l) * (d.dr * d.dd) + rd];
    absorb_block(st.v, 1, d.dl, Q, mt, d.du * d.dr * d.dd, next);
    st.v.swap(next);
  }
  const std::int64_t wrap = dims[0].du;
  std::int64_t P = dims[0].dr, vb = dims[0].dd;
  for (std::int64_t r = 1; r < rows; ++r) {
    const auto& d = dims[r];
    Q /= d.dl;
    auto m = site_matrix<T>(as_padded4(col[r], masks[r], D));
    const std::int64_t K = d.du * d.dl, Kp = d.dr * d.dd;
    std::vector<T> mt(m.size());
    for (std::int64_t i = 0; i < K; ++i)
      for (std::int64_t j = 0; j < Kp; ++j) mt[j * K + i] = m[i * Kp + j];
    absorb_block(st.v, wrap * P, vb * d.dl, Q, mt, Kp, next);
    st.v.swap(next);
    P *= d.dr;
    vb = d.dd;
  }
  require(vb == wrap, Errc::internal, "cylinder wrap dimension mismatch");
  next.assign(static_cast<std::size_t>(P), T(0));
  for (std::int64_t w = 0; w < wrap; ++w)
    for (std::int64_t p = 0; p < P; ++p) next[p] += st.v[(w * P + p) * vb + w];
  st.v.swap(next);
}

}  // namespace tnsign::detail
