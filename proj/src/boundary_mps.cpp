#include "tnsign/boundary_mps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <chrono>
#include <limits>

#include "tnsign/task_pool.hpp"
#include "transfer_detail.hpp"

namespace tnsign {

std::int64_t BoundaryMps::bond_dim_at(std::int64_t bond) const {
  require(bond >= 1 && bond < length(), Errc::argument, "bond index out of range");
  return sites[static_cast<std::size_t>(bond)].dim(0);
}

std::int64_t BoundaryMps::max_bond_dim() const {
  std::int64_t m = 1;
  for (const auto& s : sites) m = std::max(m, s.dim(0));
  return m;
}

namespace {

double relative_discard(const SvdSplit& s) {
  double kept = 0.0;
  for (double v : s.kept_spectrum) kept += v * v;
  double tot = kept + s.discarded_weight;
  return tot > 0.0 ? s.discarded_weight / tot : 0.0;
}

// Right-canonicalize with truncation; afterwards canonical_center = 0 and
// the norm sits in log_scale.
void right_canonicalize(BoundaryMps& psi, std::int64_t chi, double rel_tol) {
  const std::int64_t H = psi.length();
  for (std::int64_t r = H - 1; r >= 1; --r) {
    DenseTensor m = psi.sites[r].permuted(std::array<int, 3>{1, 2, 0});  // (p, rb, l)
    SvdSplit s = svd_split(m, {0, 1}, chi, rel_tol);
    psi.cumulative_truncation += relative_discard(s);
    psi.sites[r] = s.left.permuted(std::array<int, 3>{2, 0, 1});  // (k, p, rb)
    // absorb (right')^T = V* Sigma into the left neighbor
    psi.sites[r - 1] = contract_pair(psi.sites[r - 1], {2}, s.right, {1});
  }
  double nrm = psi.sites[0].frob_norm();
  if (nrm > 0.0) {
    psi.sites[0] = psi.sites[0].scaled(1.0 / nrm);
    psi.log_scale += std::log(nrm);
  }
  psi.canonical_center = 0;
}

// Zip-up one column MPO into the MPS, truncating on the fly.
void zip_column(BoundaryMps& psi, const LatticeNetwork& net, std::int64_t c,
                std::int64_t chi, double rel_tol) {
  const std::int64_t H = psi.length();
  const std::int64_t D = net.bond_dim;
  DenseTensor carry = DenseTensor::scalar(1.0).reshaped({1, 1, 1});  // (z, m, w)
  if (psi.sites[0].is_complex() || net.site(0, c).is_complex())
    carry = carry.to_complex();
  std::vector<DenseTensor> out(static_cast<std::size_t>(H));
  for (std::int64_t r = 0; r < H; ++r) {
    DenseTensor t4 = detail::as_padded4(net.site(r, c), net.mask(r, c), D);
    DenseTensor a = contract_pair(carry, {1}, psi.sites[r], {0});  // (z, w, pin, m2)
    DenseTensor b = contract_pair(a, {1, 2}, t4, {2, 0});          // (z, m2, pout, dd)
    b = b.permuted(std::array<int, 4>{0, 2, 1, 3});                // (z, pout, m2, dd)
    if (r < H - 1) {
      SvdSplit s = svd_split(b, {0, 1}, chi, rel_tol);
      psi.cumulative_truncation += relative_discard(s);
      out[r] = s.left;  // (z, pout, k)
      carry = s.right;  // (k, m2, dd)
      double nrm = carry.frob_norm();
      if (nrm > 0.0) {
        carry = carry.scaled(1.0 / nrm);
        psi.log_scale += std::log(nrm);
      }
    } else {
      require(b.dim(2) == 1 && b.dim(3) == 1, Errc::internal,
              "column must terminate the MPO bonds");
      out[r] = b.reshaped({b.dim(0), b.dim(1), 1});
    }
  }
  psi.sites = std::move(out);
  psi.canonical_center.reset();
}

}  // namespace

BoundaryMps boundary_mps_of_block(const LatticeNetwork& block, std::int64_t chi,
                                  double rel_tol) {
  block.validate();
  require(block.geometry == Geometry::OpenRect, Errc::argument,
          "boundary MPS needs an open rectangular block");
  require(block.open_right_edge, Errc::argument,
          "boundary MPS needs the block's right edge to be open");
  require(block.rows >= 2, Errc::argument, "block height must be >= 2");
  const std::int64_t D = block.bond_dim;
  if (chi <= 0) {
    double full = std::pow(double(D), double(block.cols));
    chi = full > 256.0 ? 256 : static_cast<std::int64_t>(std::llround(full));
    chi = std::max(chi, D);
  }
  require(chi >= D, Errc::argument, "chi must be at least the bond dimension");
  require(rel_tol >= 0.0, Errc::argument, "rel_tol must be >= 0");

  BoundaryMps psi;
  psi.chi_max = chi;
  psi.sites.reserve(static_cast<std::size_t>(block.rows));
  for (std::int64_t r = 0; r < block.rows; ++r) {
    DenseTensor t4 = detail::as_padded4(block.site(r, 0), block.mask(r, 0), D);
    // (l=1, r, u, d) -> (u, r, d)
    DenseTensor m = t4.reshaped({t4.dim(1), t4.dim(2), t4.dim(3)})
                        .permuted(std::array<int, 3>{1, 0, 2});
    psi.sites.push_back(std::move(m));
  }
  right_canonicalize(psi, chi, rel_tol);
  for (std::int64_t c = 1; c < block.cols; ++c) {
    zip_column(psi, block, c, chi, rel_tol);
    right_canonicalize(psi, chi, rel_tol);
  }
  return psi;
}

BoundaryMps block_boundary_state(const BlockSpec& spec, std::int64_t chi, double rel_tol) {
  BlockSpec s = spec;
  if (s.H <= 0) s.H = 4 * s.W;
  if (s.cut <= 0) s.cut = s.H / 2;
  require(s.H >= 2 && s.cut >= 1 && s.cut < s.H, Errc::argument, "invalid block cut");
  NetworkOptions opts;
  opts.open_right_edge = true;
  LatticeNetwork net = sample_network(s.ensemble, Geometry::OpenRect, s.H, s.W, opts);
  return boundary_mps_of_block(net, chi, rel_tol);
}

std::vector<std::vector<double>> schmidt_spectra(const BoundaryMps& psi) {
  BoundaryMps work = psi;
  if (work.canonical_center != 0) right_canonicalize(work, work.max_bond_dim() * 8, 0.0);
  const std::int64_t H = work.length();
  std::vector<std::vector<double>> spectra(static_cast<std::size_t>(H));
  for (std::int64_t r = 0; r + 1 < H; ++r) {
    SvdSplit s = svd_split(work.sites[r], {0, 1}, work.sites[r].size(), 0.0);
    work.sites[r + 1] = contract_pair(s.right, {1}, work.sites[r + 1], {0});
    double tot = 0.0;
    for (double v : s.kept_spectrum) tot += v * v;
    std::vector<double> p;
    p.reserve(s.kept_spectrum.size());
    for (double v : s.kept_spectrum) p.push_back(v * v / tot);
    spectra[static_cast<std::size_t>(r + 1)] = std::move(p);
  }
  return spectra;
}

double renyi_from_spectrum(const std::vector<double>& probs, double alpha) {
  require(alpha >= 0.0, Errc::argument, "Renyi index must be >= 0");
  if (std::abs(alpha - 1.0) < 1e-12) {
    double s = 0.0;
    for (double p : probs)
      if (p > 0.0) s -= p * std::log(p);
    return std::max(0.0, s);
  }
  double z = 0.0;
  long nonzero = 0;
  for (double p : probs) {
    if (p > 0.0) {
      z += std::pow(p, alpha);
      ++nonzero;
    }
  }
  if (alpha == 0.0) return std::log(double(nonzero));
  return std::max(0.0, std::log(z) / (1.0 - alpha));
}

EntropyRecord renyi_entropy(const BoundaryMps& psi, std::int64_t cut, double alpha) {
  require(cut >= 1 && cut < psi.length(), Errc::argument, "cut out of range");
  auto spectra = schmidt_spectra(psi);
  EntropyRecord rec;
  rec.alpha = alpha;
  rec.schmidt_spectrum = std::move(spectra[static_cast<std::size_t>(cut)]);
  rec.s2 = renyi_from_spectrum(rec.schmidt_spectrum, alpha);
  return rec;
}

DenseTensor mps_to_dense(const BoundaryMps& psi) {
  DenseTensor acc = psi.sites[0].reshaped({psi.sites[0].dim(1), psi.sites[0].dim(2)});
  for (std::int64_t r = 1; r < psi.length(); ++r) {
    int last = acc.rank() - 1;
    acc = contract_pair(acc, {last}, psi.sites[r], {0});
  }
  acc = acc.reshaped(
      std::vector<std::int64_t>(acc.shape().begin(), acc.shape().end() - 1));
  double scale = std::exp(psi.log_scale);
  require(std::isfinite(scale), Errc::size_guard,
          "dense reconstruction overflows; block too large");
  return acc.scaled(scale);
}

namespace {

std::uint64_t double_bits(double x) { return std::bit_cast<std::uint64_t>(x); }

}  // namespace

EntropyScanResult entropy_scan(const EntropyScanSpec& spec) {
  require(!spec.Ds.empty() && !spec.grid.empty() && !spec.Ws.empty(), Errc::config,
          "entropy scan grids must be nonempty");
  require(spec.trials >= 1, Errc::config, "trials must be >= 1");

  struct Point {
    std::int64_t D, W, H, chi;
    double lambda, lambda_d;
    std::uint64_t seed;
    bool exact;  // chi >= D^W
  };
  std::vector<Point> pts;
  for (auto D : spec.Ds)
    for (double g : spec.grid)
      for (auto W : spec.Ws) {
        Point p;
        p.D = D;
        p.W = W;
        p.H = spec.h_factor * W;
        p.lambda = spec.grid_is_lambda_d ? g / double(D) : g;
        p.lambda_d = p.lambda * double(D);
        double full = std::pow(double(D), double(W));
        p.chi = spec.chi > 0 ? spec.chi
                             : std::max<std::int64_t>(
                                   D, full > 256.0 ? 256
                                                   : static_cast<std::int64_t>(
                                                         std::llround(full)));
        p.exact = double(p.chi) >= full;
        p.seed = derive_seed(spec.master_seed,
                             {spec.experiment_tag, static_cast<std::uint64_t>(D),
                              double_bits(p.lambda), static_cast<std::uint64_t>(W)});
        pts.push_back(p);
      }

  EntropyScanResult result;
  result.rows.resize(pts.size() * static_cast<std::size_t>(spec.trials));
  struct ConvSample {
    double base = 0.0, doubled = 0.0;
    bool have = false;
  };
  std::vector<std::vector<ConvSample>> conv(pts.size());
  for (auto& c : conv) c.resize(static_cast<std::size_t>(spec.trials));

  auto run_trial = [&](std::size_t pi, std::int64_t trial) {
    const auto t_start = std::chrono::steady_clock::now();
    const Point& p = pts[pi];
    std::uint64_t tseed = derive_seed(p.seed, {static_cast<std::uint64_t>(trial)});
    BlockSpec bs;
    bs.W = p.W;
    bs.H = p.H;
    bs.cut = p.H / 2;
    bs.ensemble.kind = spec.kind;
    bs.ensemble.bond_dim = p.D;
    bs.ensemble.shift = p.lambda;
    bs.ensemble.seed = tseed;
    bs.ensemble.target.kind = spec.target;
    bs.ensemble.target.seed = derive_seed(p.seed, {0x74677265ULL});
    BoundaryMps psi = block_boundary_state(bs, p.chi, spec.rel_tol);
    EntropyRecord rec = renyi_entropy(psi, bs.cut, 2.0);

    EntropyScanRow row;
    row.kind = spec.kind;
    row.target = spec.target;
    row.D = p.D;
    row.lambda = p.lambda;
    row.lambda_d = p.lambda_d;
    row.W = p.W;
    row.H = p.H;
    row.chi = p.chi;
    row.trial = trial;
    row.s2 = rec.s2;
    row.trunc_weight = psi.cumulative_truncation;
    row.seed = tseed;
    row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t_start)
                      .count();
    result.rows[pi * spec.trials + trial] = row;

    bool check = !p.exact && spec.conv_check_trials > 0 && trial < spec.conv_check_trials;
    if (check) {
      BoundaryMps psi2 = block_boundary_state(bs, 2 * p.chi, spec.rel_tol);
      EntropyRecord rec2 = renyi_entropy(psi2, bs.cut, 2.0);
      conv[pi][trial] = {rec.s2, rec2.s2, true};
    }
  };

  TaskPool pool(spec.workers);
  for (std::size_t pi = 0; pi < pts.size(); ++pi)
    for (std::int64_t t = 0; t < spec.trials; ++t)
      pool.submit([&, pi, t] { run_trial(pi, t); });
  pool.wait();

  for (std::size_t pi = 0; pi < pts.size(); ++pi) {
    const Point& p = pts[pi];
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t t = 0; t < spec.trials; ++t) {
      double v = result.rows[pi * spec.trials + t].s2;
      sum += v;
      sumsq += v * v;
    }
    double mean = sum / double(spec.trials);
    double var = spec.trials > 1
                     ? std::max(0.0, (sumsq - sum * sum / double(spec.trials)) /
                                         double(spec.trials - 1))
                     : 0.0;
    EntropyScanPoint ap;
    ap.D = p.D;
    ap.lambda = p.lambda;
    ap.lambda_d = p.lambda_d;
    ap.W = p.W;
    ap.H = p.H;
    ap.chi = p.chi;
    ap.n = spec.trials;
    ap.mean_s2 = mean;
    ap.std_s2 = std::sqrt(var);
    ap.stderr_s2 = std::sqrt(var / double(spec.trials));
    if (p.exact) {
      ap.converged = true;
      ap.conv_shift = 0.0;
    } else {
      double b = 0.0, d2 = 0.0;
      long n = 0;
      for (const auto& cs : conv[pi])
        if (cs.have) {
          b += cs.base;
          d2 += cs.doubled;
          ++n;
        }
      if (n == 0) {
        ap.converged = true;
        ap.conv_shift = 0.0;
      } else {
        b /= double(n);
        d2 /= double(n);
        ap.conv_shift = std::abs(b - d2);
        ap.converged = ap.conv_shift < spec.conv_band * std::abs(d2) + 1e-9;
      }
    }
    result.points.push_back(ap);
  }
  return result;
}

double half_value_crossover(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, Errc::argument,
          "crossover needs at least two points");
  const double target = ys.front() / 2.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if ((ys[i - 1] > target) && (ys[i] <= target)) {
      double f = (ys[i - 1] - target) / (ys[i - 1] - ys[i]);
      return xs[i - 1] + f * (xs[i] - xs[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace tnsign
