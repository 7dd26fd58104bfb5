#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "tnsign/errors.hpp"

namespace tnsign {

using cx = std::complex<double>;

enum class Field { Real, Complex };

// Dense n-leg tensor, row-major flat storage with an explicit shape vector.
// Real and complex entries share one tagged type; mixing fields in a
// contraction promotes Real to Complex. Permutations materialize a copy.
class DenseTensor {
 public:
  DenseTensor() : field_(Field::Real), rdata_(1, 0.0) {}

  static DenseTensor zeros(std::vector<std::int64_t> shape, Field field);
  static DenseTensor filled(std::vector<std::int64_t> shape, double value);
  static DenseTensor from_real(std::vector<std::int64_t> shape, std::vector<double> data);
  static DenseTensor from_complex(std::vector<std::int64_t> shape, std::vector<cx> data);
  static DenseTensor scalar(double v);
  static DenseTensor scalar(cx v);
  static DenseTensor identity(std::int64_t n, Field field = Field::Real);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<std::int64_t>& shape() const { return shape_; }
  std::int64_t dim(int leg) const;
  std::int64_t size() const;
  Field field() const { return field_; }
  bool is_complex() const { return field_ == Field::Complex; }

  std::span<const double> rdata() const;
  std::span<double> rdata();
  std::span<const cx> cdata() const;
  std::span<cx> cdata();

  // Entry as complex regardless of field (flat row-major index).
  cx at(std::int64_t flat) const;
  cx at(std::span<const std::int64_t> index) const;

  DenseTensor to_complex() const;
  DenseTensor conjugate() const;
  DenseTensor permuted(std::span<const int> perm) const;
  DenseTensor reshaped(std::vector<std::int64_t> new_shape) const;
  DenseTensor scaled(cx alpha) const;
  DenseTensor scaled(double alpha) const;

  double frob_norm() const;
  double max_abs() const;
  cx entry_sum() const;
  double abs_entry_sum() const;
  bool all_finite() const;

  friend DenseTensor add(const DenseTensor& a, const DenseTensor& b);

 private:
  std::vector<std::int64_t> shape_;
  Field field_;
  std::vector<double> rdata_;
  std::vector<cx> cdata_;
};

DenseTensor add(const DenseTensor& a, const DenseTensor& b);

// Pairwise contraction over the listed legs. Paired legs must match in
// dimension; index lists must be duplicate-free and in range. The result
// carries the unpaired legs of `a` followed by the unpaired legs of `b`.
DenseTensor contract_pair(const DenseTensor& a, std::span<const int> legs_a,
                          const DenseTensor& b, std::span<const int> legs_b);
DenseTensor contract_pair(const DenseTensor& a, std::initializer_list<int> legs_a,
                          const DenseTensor& b, std::initializer_list<int> legs_b);

// Trace over two equal-dimension legs of one tensor.
DenseTensor trace_pair(const DenseTensor& t, int leg_a, int leg_b);

DenseTensor elementwise_abs(const DenseTensor& t);

struct SvdSplit {
  DenseTensor left;    // (left legs..., k)
  DenseTensor right;   // (k, right legs...), singular values absorbed here
  std::vector<double> kept_spectrum;  // non-increasing
  double discarded_weight = 0.0;      // sum of squared dropped singular values
};

// Split t across (left_legs | rest). Keeps min(chi, #values with
// sigma_k^2 > rel_tol * sum sigma^2) singular values, at least one.
SvdSplit svd_split(const DenseTensor& t, std::span<const int> left_legs,
                   std::int64_t chi, double rel_tol);
SvdSplit svd_split(const DenseTensor& t, std::initializer_list<int> left_legs,
                   std::int64_t chi, double rel_tol);

// Contract matrix m into one leg of t, in place of that leg.
// Result leg order is unchanged. If transpose_m, contracts over m's second
// index (i.e. applies m^T).
DenseTensor apply_to_leg(const DenseTensor& t, int leg, const DenseTensor& m,
                         bool transpose_m = false);

}  // namespace tnsign
