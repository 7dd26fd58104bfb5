#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tnsign/dense_tensor.hpp"
#include "tnsign/rng.hpp"

using namespace tnsign;

namespace {

DenseTensor random_real(std::vector<std::int64_t> shape, Rng& rng) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<double> data(static_cast<std::size_t>(n));
  for (auto& x : data) x = rng.normal();
  return DenseTensor::from_real(std::move(shape), std::move(data));
}

DenseTensor random_complex(std::vector<std::int64_t> shape, Rng& rng) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<cx> data(static_cast<std::size_t>(n));
  for (auto& z : data) z = rng.normal_complex();
  return DenseTensor::from_complex(std::move(shape), std::move(data));
}

}  // namespace

TEST_CASE("identity matrix contracted with M gives M") {
  Rng rng(1);
  DenseTensor m = random_real({2, 3}, rng);
  DenseTensor id = DenseTensor::identity(2);
  DenseTensor r = contract_pair(id, {1}, m, {0});
  CHECK(oracles::rel_diff(r, m) < 1e-14);
}

TEST_CASE("unit vector with itself gives 1") {
  std::vector<double> v{0.6, 0.8};
  DenseTensor t = DenseTensor::from_real({2}, v);
  DenseTensor r = contract_pair(t, {0}, t, {0});
  CHECK(r.rank() == 0);
  CHECK(r.at(0).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("contraction matches the nested-loop oracle") {
  Rng rng(2);
  DenseTensor a = random_real({2, 3, 4}, rng);
  DenseTensor b = random_real({4, 3, 5}, rng);
  DenseTensor fast = contract_pair(a, {2, 1}, b, {0, 1});
  DenseTensor slow = oracles::contract_loops(a, {2, 1}, b, {0, 1});
  CHECK(oracles::rel_diff(fast, slow) < 1e-12);

  DenseTensor ac = random_complex({3, 2, 4}, rng);
  DenseTensor bc = random_complex({4, 2}, rng);
  CHECK(oracles::rel_diff(contract_pair(ac, {2, 1}, bc, {0, 1}),
                          oracles::contract_loops(ac, {2, 1}, bc, {0, 1})) < 1e-12);
  // mixed field promotes to complex
  DenseTensor mixed = contract_pair(a, {2}, bc, {0});
  CHECK(mixed.is_complex());
}

TEST_CASE("contraction is bilinear") {
  Rng rng(3);
  DenseTensor a = random_real({3, 4}, rng);
  DenseTensor b = random_real({4, 2}, rng);
  DenseTensor lhs = contract_pair(a.scaled(2.5), {1}, b, {0});
  DenseTensor rhs = contract_pair(a, {1}, b, {0}).scaled(2.5);
  CHECK(oracles::rel_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("contraction order independence over three tensors") {
  Rng rng(4);
  DenseTensor a = random_real({2, 3}, rng);
  DenseTensor b = random_real({3, 4}, rng);
  DenseTensor c = random_real({4, 5}, rng);
  DenseTensor ab_c = contract_pair(contract_pair(a, {1}, b, {0}), {1}, c, {0});
  DenseTensor a_bc = contract_pair(a, {1}, contract_pair(b, {1}, c, {0}), {0});
  CHECK(oracles::rel_diff(ab_c, a_bc) < 1e-10);
}

TEST_CASE("contraction argument errors") {
  Rng rng(5);
  DenseTensor a = random_real({2, 3}, rng);
  DenseTensor b = random_real({4, 2}, rng);
  CHECK_THROWS_WITH_AS(contract_pair(a, {1}, b, {0}), doctest::Contains("unequal"), Error);
  CHECK_THROWS_AS(contract_pair(a, {5}, b, {0}), Error);
  CHECK_THROWS_AS(contract_pair(a, {0, 0}, b, {0, 1}), Error);
  try {
    contract_pair(a, {1}, b, {0});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension);
  }
  try {
    contract_pair(a, {7}, b, {0});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::argument);
  }
}

TEST_CASE("svd_split on a rank-1 product tensor") {
  Rng rng(6);
  DenseTensor u = random_real({3}, rng);
  DenseTensor v = random_real({4}, rng);
  DenseTensor t = contract_pair(u, std::span<const int>{}, v, std::span<const int>{});
  SvdSplit s = svd_split(t, {0}, 10, 1e-12);
  CHECK(s.kept_spectrum.size() == 1);
  CHECK(s.discarded_weight == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("svd_split of the 4x4 identity at chi = 2 discards weight 2") {
  DenseTensor id = DenseTensor::identity(4);
  SvdSplit s = svd_split(id, {0}, 2, 0.0);
  CHECK(s.kept_spectrum.size() == 2);
  CHECK(s.discarded_weight == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("svd_split reconstructs at full rank") {
  Rng rng(7);
  for (Field f : {Field::Real, Field::Complex}) {
    DenseTensor t = f == Field::Real ? random_real({3, 2, 4, 2}, rng)
                                     : random_complex({3, 2, 4, 2}, rng);
    SvdSplit s = svd_split(t, {0, 2}, 1000, 0.0);
    DenseTensor back = contract_pair(s.left, {2}, s.right, {0});
    // back has legs (0, 2, 1, 3) of t
    DenseTensor tp = t.permuted(std::array<int, 4>{0, 2, 1, 3});
    CHECK(oracles::rel_diff(back, tp) < 1e-10);
    CHECK(s.discarded_weight < 1e-20 * t.frob_norm() * t.frob_norm());
  }
}

TEST_CASE("svd_split argument errors") {
  Rng rng(8);
  DenseTensor t = random_real({3, 4}, rng);
  CHECK_THROWS_AS(svd_split(t, {0}, 0, 0.0), Error);
  CHECK_THROWS_AS(svd_split(t, {0, 1}, 2, 0.0), Error);  // not a proper subset
  CHECK_THROWS_AS(svd_split(t, std::initializer_list<int>{}, 2, 0.0), Error);
}

TEST_CASE("elementwise_abs maps entries to moduli and is idempotent") {
  DenseTensor t = DenseTensor::from_real({2}, {-1.0, 2.0});
  DenseTensor a = elementwise_abs(t);
  CHECK(a.at(0).real() == 1.0);
  CHECK(a.at(1).real() == 2.0);

  DenseTensor z = DenseTensor::from_complex({1}, {cx(3.0, 4.0)});
  DenseTensor az = elementwise_abs(z);
  CHECK_FALSE(az.is_complex());
  CHECK(az.at(0).real() == doctest::Approx(5.0));

  Rng rng(9);
  DenseTensor r = random_complex({2, 3}, rng);
  CHECK(oracles::rel_diff(elementwise_abs(elementwise_abs(r)), elementwise_abs(r)) == 0.0);
}

TEST_CASE("permute round trip and trace_pair") {
  Rng rng(10);
  DenseTensor t = random_real({2, 3, 4}, rng);
  DenseTensor p = t.permuted(std::array<int, 3>{2, 0, 1});
  DenseTensor back = p.permuted(std::array<int, 3>{1, 2, 0});
  CHECK(oracles::rel_diff(back, t) == 0.0);

  DenseTensor m = random_real({3, 3}, rng);
  DenseTensor tr = trace_pair(m, 0, 1);
  double expect = 0.0;
  for (int i = 0; i < 3; ++i) expect += m.at(std::array<std::int64_t, 2>{i, i}).real();
  CHECK(tr.at(0).real() == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("apply_to_leg matches explicit contraction") {
  Rng rng(11);
  DenseTensor t = random_real({2, 3, 4}, rng);
  DenseTensor m = random_real({3, 3}, rng);
  DenseTensor r = apply_to_leg(t, 1, m);
  DenseTensor expect = oracles::contract_loops(t, {1}, m, {0});
  // oracle output has the new leg last; rotate to compare
  expect = expect.permuted(std::array<int, 3>{0, 2, 1});
  CHECK(oracles::rel_diff(r, expect) < 1e-13);
}

TEST_CASE("all outputs finite on random input") {
  Rng rng(12);
  DenseTensor t = random_complex({4, 4, 4}, rng);
  CHECK(t.all_finite());
  CHECK(elementwise_abs(t).all_finite());
  SvdSplit s = svd_split(t, {0}, 2, 1e-10);
  CHECK(s.left.all_finite());
  CHECK(s.right.all_finite());
}
