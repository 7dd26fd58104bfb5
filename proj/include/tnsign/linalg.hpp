#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace tnsign::linalg {

using cx = std::complex<double>;

// Row-major C = A(m x k) * B(k x n).
void gemm_real(std::int64_t m, std::int64_t n, std::int64_t k,
               const double* a, const double* b, double* c);
void gemm_complex(std::int64_t m, std::int64_t n, std::int64_t k,
                  const cx* a, const cx* b, cx* c);

// Thin SVD of a row-major m x n matrix; u is m x min(m,n), vt is min(m,n) x n,
// sigma non-increasing.
void svd_real(std::int64_t m, std::int64_t n, const double* a,
              double* sigma, std::vector<double>& u, std::vector<double>& vt);
void svd_complex(std::int64_t m, std::int64_t n, const cx* a,
                 double* sigma, std::vector<cx>& u, std::vector<cx>& vt);

std::vector<double> singular_values_real(std::int64_t m, std::int64_t n, const double* a);
std::vector<double> singular_values_complex(std::int64_t m, std::int64_t n, const cx* a);

// Eigen-decomposition of a Hermitian/symmetric n x n matrix (row-major).
// Eigenvalues ascending; eigenvectors returned as columns of `vecs`.
void eigh_real(std::int64_t n, const double* a, std::vector<double>& vals,
               std::vector<double>& vecs);
void eigh_complex(std::int64_t n, const cx* a, std::vector<double>& vals,
                  std::vector<cx>& vecs);

// Inverse of a general n x n matrix (row-major). Throws on singularity.
std::vector<double> inverse_real(std::int64_t n, const double* a);
std::vector<cx> inverse_complex(std::int64_t n, const cx* a);

// 2-norm condition number via singular values.
double cond_real(std::int64_t n, const double* a);
double cond_complex(std::int64_t n, const cx* a);

}  // namespace tnsign::linalg
