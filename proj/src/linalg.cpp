#include "tnsign/linalg.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <limits>

#include "tnsign/errors.hpp"

namespace tnsign::linalg {

void gemm_real(std::int64_t m, std::int64_t n, std::int64_t k,
               const double* a, const double* b, double* c) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    std::fill(c, c + m * n, 0.0);
    return;
  }
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(m),
              static_cast<int>(n), static_cast<int>(k), 1.0, a, static_cast<int>(k), b,
              static_cast<int>(n), 0.0, c, static_cast<int>(n));
}

void gemm_complex(std::int64_t m, std::int64_t n, std::int64_t k,
                  const cx* a, const cx* b, cx* c) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    std::fill(c, c + m * n, cx(0.0));
    return;
  }
  const cx one(1.0), zero(0.0);
  cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(m),
              static_cast<int>(n), static_cast<int>(k), &one, a, static_cast<int>(k), b,
              static_cast<int>(n), &zero, c, static_cast<int>(n));
}

void svd_real(std::int64_t m, std::int64_t n, const double* a,
              double* sigma, std::vector<double>& u, std::vector<double>& vt) {
  const std::int64_t k = std::min(m, n);
  std::vector<double> work(a, a + m * n);
  u.assign(static_cast<std::size_t>(m * k), 0.0);
  vt.assign(static_cast<std::size_t>(k * n), 0.0);
  int info = LAPACKE_dgesdd(LAPACK_ROW_MAJOR, 'S', static_cast<int>(m), static_cast<int>(n),
                            work.data(), static_cast<int>(n), sigma, u.data(),
                            static_cast<int>(k), vt.data(), static_cast<int>(n));
  if (info != 0) {
    // dgesdd can fail to converge on rare inputs; dgesvd is slower but sturdier
    work.assign(a, a + m * n);
    std::vector<double> superb(k > 1 ? k - 1 : 1);
    info = LAPACKE_dgesvd(LAPACK_ROW_MAJOR, 'S', 'S', static_cast<int>(m), static_cast<int>(n),
                          work.data(), static_cast<int>(n), sigma, u.data(),
                          static_cast<int>(k), vt.data(), static_cast<int>(n), superb.data());
  }
  require(info == 0, Errc::internal, "LAPACK SVD failed");
}

void svd_complex(std::int64_t m, std::int64_t n, const cx* a,
                 double* sigma, std::vector<cx>& u, std::vector<cx>& vt) {
  const std::int64_t k = std::min(m, n);
  std::vector<cx> work(a, a + m * n);
  u.assign(static_cast<std::size_t>(m * k), cx(0.0));
  vt.assign(static_cast<std::size_t>(k * n), cx(0.0));
  int info = LAPACKE_zgesdd(LAPACK_ROW_MAJOR, 'S', static_cast<int>(m), static_cast<int>(n),
                            reinterpret_cast<lapack_complex_double*>(work.data()),
                            static_cast<int>(n), sigma,
                            reinterpret_cast<lapack_complex_double*>(u.data()),
                            static_cast<int>(k),
                            reinterpret_cast<lapack_complex_double*>(vt.data()),
                            static_cast<int>(n));
  if (info != 0) {
    work.assign(a, a + m * n);
    std::vector<double> superb(k > 1 ? k - 1 : 1);
    info = LAPACKE_zgesvd(LAPACK_ROW_MAJOR, 'S', 'S', static_cast<int>(m), static_cast<int>(n),
                          reinterpret_cast<lapack_complex_double*>(work.data()),
                          static_cast<int>(n), sigma,
                          reinterpret_cast<lapack_complex_double*>(u.data()),
                          static_cast<int>(k),
                          reinterpret_cast<lapack_complex_double*>(vt.data()),
                          static_cast<int>(n), superb.data());
  }
  require(info == 0, Errc::internal, "LAPACK SVD failed");
}

std::vector<double> singular_values_real(std::int64_t m, std::int64_t n, const double* a) {
  const std::int64_t k = std::min(m, n);
  std::vector<double> sigma(k);
  std::vector<double> u, vt;
  svd_real(m, n, a, sigma.data(), u, vt);
  return sigma;
}

std::vector<double> singular_values_complex(std::int64_t m, std::int64_t n, const cx* a) {
  const std::int64_t k = std::min(m, n);
  std::vector<double> sigma(k);
  std::vector<cx> u, vt;
  svd_complex(m, n, a, sigma.data(), u, vt);
  return sigma;
}

void eigh_real(std::int64_t n, const double* a, std::vector<double>& vals,
               std::vector<double>& vecs) {
  vecs.assign(a, a + n * n);
  vals.assign(static_cast<std::size_t>(n), 0.0);
  int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'V', 'U', static_cast<int>(n), vecs.data(),
                            static_cast<int>(n), vals.data());
  require(info == 0, Errc::internal, "LAPACK dsyevd failed");
  // row-major + column eigenvectors: LAPACKE stores eigenvector j in column j
}

void eigh_complex(std::int64_t n, const cx* a, std::vector<double>& vals,
                  std::vector<cx>& vecs) {
  vecs.assign(a, a + n * n);
  vals.assign(static_cast<std::size_t>(n), 0.0);
  int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'V', 'U', static_cast<int>(n),
                            reinterpret_cast<lapack_complex_double*>(vecs.data()),
                            static_cast<int>(n), vals.data());
  require(info == 0, Errc::internal, "LAPACK zheevd failed");
}

std::vector<double> inverse_real(std::int64_t n, const double* a) {
  std::vector<double> work(a, a + n * n);
  std::vector<int> ipiv(static_cast<std::size_t>(n));
  int info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, static_cast<int>(n), static_cast<int>(n),
                            work.data(), static_cast<int>(n), ipiv.data());
  require(info == 0, Errc::argument, "matrix is singular");
  info = LAPACKE_dgetri(LAPACK_ROW_MAJOR, static_cast<int>(n), work.data(),
                        static_cast<int>(n), ipiv.data());
  require(info == 0, Errc::argument, "matrix is singular");
  return work;
}

std::vector<cx> inverse_complex(std::int64_t n, const cx* a) {
  std::vector<cx> work(a, a + n * n);
  std::vector<int> ipiv(static_cast<std::size_t>(n));
  int info = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, static_cast<int>(n), static_cast<int>(n),
                            reinterpret_cast<lapack_complex_double*>(work.data()),
                            static_cast<int>(n), ipiv.data());
  require(info == 0, Errc::argument, "matrix is singular");
  info = LAPACKE_zgetri(LAPACK_ROW_MAJOR, static_cast<int>(n),
                        reinterpret_cast<lapack_complex_double*>(work.data()),
                        static_cast<int>(n), ipiv.data());
  require(info == 0, Errc::argument, "matrix is singular");
  return work;
}

double cond_real(std::int64_t n, const double* a) {
  auto s = singular_values_real(n, n, a);
  if (s.back() <= 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

double cond_complex(std::int64_t n, const cx* a) {
  auto s = singular_values_complex(n, n, a);
  if (s.back() <= 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

}  // namespace tnsign::linalg
