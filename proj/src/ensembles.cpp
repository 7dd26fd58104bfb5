#include "tnsign/ensembles.hpp"

#include <cmath>

namespace tnsign {

const char* ensemble_kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::HaarOrthogonal: return "orthogonal";
    case EnsembleKind::HaarUnitary: return "unitary";
    case EnsembleKind::GaussianReal: return "gaussian_real";
    case EnsembleKind::GaussianComplex: return "gaussian_complex";
  }
  return "?";
}

EnsembleKind ensemble_kind_from_name(const std::string& s) {
  if (s == "orthogonal") return EnsembleKind::HaarOrthogonal;
  if (s == "unitary") return EnsembleKind::HaarUnitary;
  if (s == "gaussian_real") return EnsembleKind::GaussianReal;
  if (s == "gaussian_complex") return EnsembleKind::GaussianComplex;
  fail(Errc::argument, "unknown ensemble kind: " + s);
}

const char* target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::AllOnes: return "allones";
    case TargetKind::Rank1Signed: return "rank1signed";
    case TargetKind::Rank1Haar: return "rank1haar";
    case TargetKind::PositiveRandom: return "positiverandom";
  }
  return "?";
}

TargetKind target_kind_from_name(const std::string& s) {
  if (s == "allones") return TargetKind::AllOnes;
  if (s == "rank1signed") return TargetKind::Rank1Signed;
  if (s == "rank1haar") return TargetKind::Rank1Haar;
  if (s == "positiverandom") return TargetKind::PositiveRandom;
  fail(Errc::argument, "unknown interpolation target: " + s);
}

bool ensemble_is_complex(EnsembleKind k) {
  return k == EnsembleKind::HaarUnitary || k == EnsembleKind::GaussianComplex;
}

DenseTensor sample_haar_vector(std::int64_t n, Field field, Rng& rng) {
  require(n >= 1, Errc::argument, "sample_haar_vector: n must be >= 1");
  if (field == Field::Real) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double nrm2 = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      nrm2 += x * x;
    }
    double inv = 1.0 / std::sqrt(nrm2);
    for (auto& x : v) x *= inv;
    return DenseTensor::from_real({n}, std::move(v));
  }
  std::vector<cx> v(static_cast<std::size_t>(n));
  double nrm2 = 0.0;
  for (auto& z : v) {
    z = rng.normal_complex();
    nrm2 += std::norm(z);
  }
  double inv = 1.0 / std::sqrt(nrm2);
  for (auto& z : v) z *= inv;
  return DenseTensor::from_complex({n}, std::move(v));
}

namespace {

std::vector<std::int64_t> leg_shape(std::int64_t D, const LegMask& legs) {
  std::vector<std::int64_t> s;
  if (legs.left) s.push_back(D);
  if (legs.right) s.push_back(D);
  if (legs.up) s.push_back(D);
  if (legs.down) s.push_back(D);
  return s;
}

// Alternating-sign vector with balanced +1/-1 counts (up to rounding).
std::vector<double> signed_leg_vector(std::int64_t D) {
  std::vector<double> v(static_cast<std::size_t>(D));
  for (std::int64_t i = 0; i < D; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
  return v;
}

DenseTensor outer_product(const std::vector<DenseTensor>& vecs) {
  DenseTensor out = vecs.front();
  for (std::size_t i = 1; i < vecs.size(); ++i)
    out = contract_pair(out, std::span<const int>{}, vecs[i], std::span<const int>{});
  return out;
}

}  // namespace

DenseTensor target_tensor(const EnsembleSpec& spec, const LegMask& legs, Rng& site_rng) {
  const std::int64_t D = spec.bond_dim;
  require(D >= 1, Errc::argument, "bond dimension must be >= 1");
  const int k = legs.count();
  require(k >= 2 && k <= 4, Errc::argument, "site tensors have 2..4 legs");
  auto shape = leg_shape(D, legs);

  switch (spec.target.kind) {
    case TargetKind::AllOnes:
      return DenseTensor::filled(shape, 1.0);
    case TargetKind::Rank1Signed: {
      // left and up leg vectors are balanced +-1, right and down all ones,
      // so the overlap across any shared edge is sign-balanced.
      std::vector<DenseTensor> vecs;
      auto ones = DenseTensor::filled({D}, 1.0);
      if (legs.left) vecs.push_back(DenseTensor::from_real({D}, signed_leg_vector(D)));
      if (legs.right) vecs.push_back(ones);
      if (legs.up) vecs.push_back(DenseTensor::from_real({D}, signed_leg_vector(D)));
      if (legs.down) vecs.push_back(ones);
      return outer_product(vecs);
    }
    case TargetKind::Rank1Haar: {
      // Four independent Haar leg vectors, scaled by sqrt(D) so entries have
      // typical magnitude 1 (a rotated all-ones vector has norm sqrt(D)).
      Field f = ensemble_is_complex(spec.kind) ? Field::Complex : Field::Real;
      std::vector<DenseTensor> vecs;
      for (int i = 0; i < k; ++i)
        vecs.push_back(sample_haar_vector(D, f, site_rng).scaled(std::sqrt(double(D))));
      return outer_product(vecs);
    }
    case TargetKind::PositiveRandom: {
      // Site-fixed positive tensor, entries uniform in [0, 2]; one fixed
      // tensor per leg count so boundary sites stay consistent.
      Rng trng(derive_seed(spec.target.seed, {0x5054ULL, static_cast<std::uint64_t>(k)}));
      std::int64_t n = 1;
      for (auto d : shape) n *= d;
      std::vector<double> v(static_cast<std::size_t>(n));
      for (auto& x : v) x = 2.0 * trng.uniform();
      return DenseTensor::from_real(shape, std::move(v));
    }
  }
  fail(Errc::internal, "unreachable");
}

DenseTensor make_site_tensor(const EnsembleSpec& spec, const LegMask& legs, Rng& site_rng) {
  const std::int64_t D = spec.bond_dim;
  require(D >= 1, Errc::argument, "bond dimension must be >= 1");
  require(spec.shift >= 0.0, Errc::argument, "shift lambda must be >= 0");
  const int k = legs.count();
  require(k >= 2 && k <= 4, Errc::argument, "site tensors have 2..4 legs");
  auto shape = leg_shape(D, legs);
  std::int64_t n = 1;
  for (auto d : shape) n *= d;

  DenseTensor random_part;
  switch (spec.kind) {
    case EnsembleKind::HaarOrthogonal:
      random_part = sample_haar_vector(n, Field::Real, site_rng)
                        .scaled(std::pow(double(D), k / 2.0))
                        .reshaped(shape);
      break;
    case EnsembleKind::HaarUnitary:
      random_part = sample_haar_vector(n, Field::Complex, site_rng)
                        .scaled(cx(std::pow(double(D), k / 2.0)))
                        .reshaped(shape);
      break;
    case EnsembleKind::GaussianReal: {
      std::vector<double> v(static_cast<std::size_t>(n));
      for (auto& x : v) x = site_rng.normal();
      random_part = DenseTensor::from_real(shape, std::move(v));
      break;
    }
    case EnsembleKind::GaussianComplex: {
      std::vector<cx> v(static_cast<std::size_t>(n));
      for (auto& z : v) z = site_rng.normal_complex();
      random_part = DenseTensor::from_complex(shape, std::move(v));
      break;
    }
  }
  if (spec.shift == 0.0) return random_part;
  DenseTensor s = target_tensor(spec, legs, site_rng);
  return add(random_part, s.scaled(spec.shift));
}

DenseTensor make_peps_tensor(const PepsSpec& spec, Rng& rng) {
  LegMask all{true, true, true, true};
  return make_peps_site_tensor(spec, all, rng);
}

DenseTensor make_peps_site_tensor(const PepsSpec& spec, const LegMask& legs, Rng& rng) {
  require(spec.bond_dim >= 1 && spec.phys_dim >= 1, Errc::argument,
          "PEPS dimensions must be >= 1");
  std::vector<std::int64_t> shape{spec.phys_dim};
  for (auto d : leg_shape(spec.bond_dim, legs)) shape.push_back(d);
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return sample_haar_vector(n, Field::Complex, rng).reshaped(shape);
}

}  // namespace tnsign
