#include "latgauss/gaussian.hpp"

#include "latgauss/rng.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace latgauss {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();
constexpr int kMaxAttempts = 6;

// Accumulated float error of a K-term positive sum with |terms| summing to abs_sum.
Real rounding_slack(std::uint64_t terms, Real abs_sum) {
  return (static_cast<Real>(terms) + 16) * 8 * LDBL_EPSILON * abs_sum;
}

bool is_zero(const RealVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0) return false;
  return true;
}

void check_tol(Real tol) {
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
}

// Visit x = y - center for y in L with |P(y - center)| <= radius.
template <class F>
std::uint64_t for_ball(Enumerator& e, const RealVec& center, Real radius, F&& f) {
  return e.run(center, radius * radius, [&](const std::int64_t* red, Real dist2, Real&) {
    f(RealVec(e.point(red) - center), dist2);
  });
}

}  // namespace

Real tail_factor(std::size_t n, int k, Real radius) {
  if (!(radius > 0)) return kInf;
  const Real r2 = radius * radius;
  const Real amin = static_cast<Real>(k) / (2 * kPi * r2);
  if (amin >= 1) return kInf;
  Real a = 1 - static_cast<Real>(n) / (2 * kPi * r2);
  const Real tiny = 1e-12L;
  a = std::max(a, std::max(amin, tiny));
  a = std::min(a, 1 - tiny);
  const Real logv = -(static_cast<Real>(n) / 2) * std::log1p(-a) + k * std::log(radius) - kPi * a * r2;
  return std::exp(logv);
}

Real tail_radius(std::size_t n, int k, Real target) {
  if (!(target > 0)) throw DomainError("tail target must be positive");
  Real hi = std::max<Real>(1, std::sqrt(static_cast<Real>(n + static_cast<std::size_t>(k) + 1) / (2 * kPi)));
  int guard = 0;
  while (tail_factor(n, k, hi) > target) {
    hi *= 2;
    if (++guard > 80) throw DomainError("tail target unreachable");
  }
  Real lo = hi / 2;
  if (tail_factor(n, k, lo) <= target) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-12L * hi; ++it) {
    const Real mid = (lo + hi) / 2;
    (tail_factor(n, k, mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

ScalarEvaluation rho_shifted(const LatticeBasis& basis, const RealVec& shift, Real s, Real tol) {
  check_tol(tol);
  if (!(s > 0)) throw DomainError("Gaussian parameter must be positive");
  const std::size_t n = basis.rank();
  const RealVec sp = basis.project_to_span(shift);
  const Real perp = std::exp(-kPi * (shift - sp).squaredNorm() / (s * s));
  const bool unshifted = is_zero(sp);
  Enumerator e(basis);
  Real rho_hat = 1, target = tol / 4;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Real r = tail_radius(n, 0, target / rho_hat);
    const Real t0 = tail_factor(n, 0, r);
    Real d = 0, a = 0;
    std::uint64_t kd = for_ball(e, RealVec::Zero(sp.size()), r * s,
                                [&](const RealVec&, Real d2) { d += std::exp(-kPi * d2 / (s * s)); });
    std::uint64_t ka = kd;
    if (unshifted) {
      a = d;
    } else {
      ka = for_ball(e, RealVec(-sp), r * s, [&](const RealVec&, Real d2) { a += std::exp(-kPi * d2 / (s * s)); });
    }
    const Real upper = (d + rounding_slack(kd, d)) / (1 - t0);
    const Real bound = perp * (t0 * upper + rounding_slack(ka, a));
    if (bound <= tol) return {perp * a, bound, r * s};
    rho_hat = upper;
    target *= tol / (2 * bound);
  }
  throw LatticeError("rho_shifted: truncation could not be certified");
}

ScalarEvaluation periodic_f(const LatticeBasis& basis, const RealVec& t, Real tol) {
  check_tol(tol);
  const std::size_t n = basis.rank();
  const RealVec tp = basis.project_to_span(t);
  const bool at_zero = is_zero(tp);
  Enumerator e(basis);
  Real rho_hat = 1, target = tol / 4;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Real r = tail_radius(n, 0, target / rho_hat);
    const Real t0 = tail_factor(n, 0, r);
    Real d = 0, a = 0;
    const std::uint64_t kd =
        for_ball(e, RealVec::Zero(tp.size()), r, [&](const RealVec&, Real d2) { d += std::exp(-kPi * d2); });
    std::uint64_t ka = kd;
    if (at_zero) {
      a = d;
    } else {
      ka = for_ball(e, RealVec(-tp), r, [&](const RealVec&, Real d2) { a += std::exp(-kPi * d2); });
    }
    const Real rd = rounding_slack(kd, d), ra = rounding_slack(ka, a);
    const Real upper = (d + rd) / (1 - t0);
    const Real tail = t0 * upper;
    const Real bound = at_zero ? 0 : (tail + ra) / d + a * (tail + rd) / (d * d);
    if (bound <= tol) return {at_zero ? Real(1) : a / d, bound, r};
    rho_hat = upper;
    target *= tol / (2 * bound);
  }
  throw LatticeError("periodic_f: truncation could not be certified");
}

ScalarEvaluation periodic_f_dual(const LatticeBasis& basis, const RealVec& t, Real tol) {
  check_tol(tol);
  const LatticeBasis& dual = basis.dual();
  const std::size_t n = dual.rank();
  const RealVec tp = basis.project_to_span(t);
  const bool at_zero = is_zero(tp);
  Enumerator e(dual);
  Real rho_hat = 1, target = tol / 4;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Real r = tail_radius(n, 0, target / rho_hat);
    const Real t0 = tail_factor(n, 0, r);
    Real d = 0, a = 0, abs_a = 0;
    const std::uint64_t k = for_ball(e, RealVec::Zero(tp.size()), r, [&](const RealVec& w, Real d2) {
      const Real rho = std::exp(-kPi * d2);
      d += rho;
      const Real c = at_zero ? Real(1) : std::cos(2 * kPi * w.dot(tp));
      a += rho * c;
      abs_a += rho;
    });
    const Real rd = rounding_slack(k, d), ra = rounding_slack(k, abs_a);
    const Real upper = (d + rd) / (1 - t0);
    const Real tail = t0 * upper;
    const Real bound = at_zero ? 0 : (tail + ra) / d + std::fabs(a) * (tail + rd) / (d * d);
    if (bound <= tol) return {at_zero ? Real(1) : a / d, bound, r};
    rho_hat = upper;
    target *= tol / (2 * bound);
  }
  throw LatticeError("periodic_f_dual: truncation could not be certified");
}

Derivatives derivatives_f(const LatticeBasis& basis, const RealVec& t, Real tol) {
  check_tol(tol);
  const LatticeBasis& dual = basis.dual();
  const std::size_t n = dual.rank();
  const auto m = static_cast<Eigen::Index>(basis.ambient_dim());
  const RealVec tp = basis.project_to_span(t);
  Enumerator e(dual);
  Real rho_hat = 1, target = tol / 16;
  const Real tp2 = 2 * kPi, fp2 = 4 * kPi * kPi;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Real r = std::max({tail_radius(n, 0, target / rho_hat), tail_radius(n, 1, target / (tp2 * rho_hat)),
                             tail_radius(n, 2, target / (fp2 * rho_hat))});
    const Real t0 = tail_factor(n, 0, r), t1 = tail_factor(n, 1, r), t2 = tail_factor(n, 2, r);
    Real d = 0, fv = 0, abs_g = 0, abs_h = 0;
    RealVec g = RealVec::Zero(m);
    RealMat h = RealMat::Zero(m, m);
    const std::uint64_t k = for_ball(e, RealVec::Zero(m), r, [&](const RealVec& w, Real d2) {
      const Real rho = std::exp(-kPi * d2);
      const Real th = tp2 * w.dot(tp);
      const Real c = std::cos(th), sn = std::sin(th);
      d += rho;
      fv += rho * c;
      g.noalias() -= (tp2 * rho * sn) * w;
      h.noalias() -= (fp2 * rho * c) * (w * w.transpose());
      abs_g += tp2 * rho * std::sqrt(d2);
      abs_h += fp2 * rho * d2;
    });
    const Real rd = rounding_slack(k, d);
    const Real upper = (d + rd) / (1 - t0);
    const Real dt = t0 * upper + rd;
    const Real fb = (t0 * upper + rounding_slack(k, d)) / d + std::fabs(fv) * dt / (d * d);
    const Real gb = (tp2 * t1 * upper + rounding_slack(k, abs_g)) / d + g.norm() * dt / (d * d);
    const Real hb = (fp2 * t2 * upper + rounding_slack(k, abs_h)) / d + h.norm() * dt / (d * d);
    const Real worst = std::max({fb, gb, hb});
    if (worst <= tol) return {{fv / d, fb, r}, {g / d, gb, r}, {h / d, hb, r}};
    rho_hat = upper;
    target *= tol / (2 * worst);
  }
  throw LatticeError("derivatives_f: truncation could not be certified");
}

Derivatives derivatives_f_primal(const LatticeBasis& basis, const RealVec& t, Real tol) {
  check_tol(tol);
  const std::size_t n = basis.rank();
  const auto m = static_cast<Eigen::Index>(basis.ambient_dim());
  const RealVec tp = basis.project_to_span(t);
  Enumerator e(basis);
  Real rho_hat = 1, target = tol / 16;
  const Real tp2 = 2 * kPi, fp2 = 4 * kPi * kPi;
  RealMat proj = basis.real_rows().transpose() * basis.dual().real_rows();  // onto span(L)
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Real r = std::max({tail_radius(n, 0, target / ((1 + tp2) * rho_hat)), tail_radius(n, 1, target / (tp2 * rho_hat)),
                             tail_radius(n, 2, target / (fp2 * rho_hat))});
    const Real t0 = tail_factor(n, 0, r), t1 = tail_factor(n, 1, r), t2 = tail_factor(n, 2, r);
    Real d = 0;
    const std::uint64_t kd =
        for_ball(e, RealVec::Zero(m), r, [&](const RealVec&, Real d2) { d += std::exp(-kPi * d2); });
    Real fv = 0, abs_g = 0, abs_h = 0;
    RealVec g = RealVec::Zero(m);
    RealMat h = RealMat::Zero(m, m);
    const std::uint64_t k = for_ball(e, RealVec(-tp), r, [&](const RealVec& x, Real d2) {
      const Real rho = std::exp(-kPi * d2);
      fv += rho;
      g.noalias() -= (tp2 * rho) * x;
      h.noalias() += (fp2 * rho) * (x * x.transpose());
      abs_g += tp2 * rho * std::sqrt(d2);
      abs_h += rho * (fp2 * d2 + tp2);
    });
    h -= (tp2 * fv) * proj;
    const Real rd = rounding_slack(kd, d);
    const Real upper = (d + rd) / (1 - t0);
    const Real dt = t0 * upper + rd;
    const Real fb = (t0 * upper + rounding_slack(k, fv)) / d + fv * dt / (d * d);
    const Real gb = (tp2 * t1 * upper + rounding_slack(k, abs_g)) / d + g.norm() * dt / (d * d);
    const Real hb = ((fp2 * t2 + tp2 * t0) * upper + rounding_slack(k, abs_h)) / d + h.norm() * dt / (d * d);
    const Real worst = std::max({fb, gb, hb});
    if (worst <= tol) return {{fv / d, fb, r}, {g / d, gb, r}, {h / d, hb, r}};
    rho_hat = upper;
    target *= tol / (2 * worst);
  }
  throw LatticeError("derivatives_f_primal: truncation could not be certified");
}

Real smoothing_lower_bound(Real dual_lambda1, Real eps) {
  return std::sqrt(std::log(2 / eps) / kPi) / dual_lambda1;
}

Real smoothing_upper_bound(Real dual_lambda1, std::size_t n, Real eps) {
  return (std::sqrt(std::log((1 + eps) / eps) / kPi) + std::sqrt(static_cast<Real>(n) / (2 * kPi))) / dual_lambda1;
}

SmoothingResult smoothing_parameter(const LatticeBasis& basis, Real eps, Real tol) {
  if (!(eps > 0 && eps < 1)) throw DomainError("smoothing parameter needs 0 < eps < 1");
  if (tol <= 0) tol = 1e-6L * eps;
  const std::size_t n = basis.rank();
  if (n == 0) throw DomainError("smoothing parameter of a rank-0 lattice is undefined");
  const LatticeBasis& dual = basis.dual();
  SmoothingResult res;
  res.eps = eps;
  res.dual_lambda1 = std::sqrt(to_real(lambda1_squared(dual)));
  res.sandwich_lo = smoothing_lower_bound(res.dual_lambda1, eps);
  res.sandwich_hi = smoothing_upper_bound(res.dual_lambda1, n, eps);
  const Real lo0 = res.sandwich_lo;

  // Distinct squared norms of nonzero dual points, with multiplicities.
  std::vector<std::pair<Real, Real>> shells;
  Real tail = kInf;
  Enumerator e(dual);
  Real rho_hat = 2, target = tol / 4;
  std::uint64_t count = 0;
  for (int attempt = 0; attempt < kMaxAttempts && !(tail <= tol / 2); ++attempt) {
    const Real r = tail_radius(n, 0, target / rho_hat) / lo0;
    std::vector<Real> norms;
    count = e.run(RealVec::Zero(static_cast<Eigen::Index>(basis.ambient_dim())), r * r,
                  [&](const std::int64_t*, Real d2, Real&) {
                    if (d2 > 0) norms.push_back(d2);
                  });
    std::sort(norms.begin(), norms.end());
    shells.clear();
    for (Real v : norms) {
      if (!shells.empty() && v - shells.back().first <= 1e-13L * v) shells.back().second += 1;
      else shells.emplace_back(v, 1);
    }
    Real h = 0;
    for (auto [v, c] : shells) h += c * std::exp(-kPi * lo0 * lo0 * v);
    const Real t0 = tail_factor(n, 0, lo0 * r);
    const Real upper = (1 + h) / (1 - t0);
    tail = t0 * upper;
    rho_hat = upper;
    target /= 4;
  }
  if (!(tail <= tol / 2)) throw LatticeError("smoothing_parameter: truncation could not be certified");

  auto h_of = [&](Real s) {
    Real h = 0;
    for (auto [v, c] : shells) h += c * std::exp(-kPi * s * s * v);
    return h;
  };
  // Float error of h; shells merged at 1e-13 relative shift exponents slightly.
  auto slack = [&](Real s, Real h) { return rounding_slack(count, h) + 1e-12L * kPi * s * s * h; };

  Real lo = res.sandwich_lo, hi = res.sandwich_hi;
  if (h_of(lo) + tail < eps) throw LatticeError("smoothing_parameter: lower bracket fails");
  if (h_of(hi) > eps) throw LatticeError("smoothing_parameter: upper bracket fails");
  Real mid = (lo + hi) / 2, hm = h_of(mid);
  for (int it = 0; it < 400; ++it) {
    mid = (lo + hi) / 2;
    hm = h_of(mid);
    const Real resid = std::fabs(hm - eps) + tail + slack(mid, hm);
    if (hi - lo <= 1e-10L * lo && resid <= tol) break;
    if (hi - lo <= 8 * LDBL_EPSILON * lo) break;
    (hm > eps ? lo : hi) = mid;
  }
  res.eta = mid;
  res.lo = lo;
  res.hi = hi;
  res.residual = std::fabs(hm - eps) + tail + slack(mid, hm);
  if (res.residual > tol) throw LatticeError("smoothing_parameter: residual above tolerance");
  return res;
}

Real s_eps_formula(Real eps) { return std::sqrt(std::log(2 * (1 + eps) / eps) / kPi); }

SEpsDelta s_eps_delta_max(Real eps) {
  if (!(eps > 0 && eps < Real(1) / 200)) throw DomainError("s_eps needs 0 < eps < 1/200");
  const Real s = s_eps_formula(eps);
  return {s, Real(0.5) - 2 / (kPi * s * s)};
}

namespace {

constexpr Real kOneDimCut = 4.5L;  // exp(-pi * 4.5^2) < 2^-91

// rho_s(Z - c) over the window that sample_z draws from.
struct ZWindow {
  std::int64_t lo, hi;
};

ZWindow z_window(Real s, Real c) {
  const Real w = kOneDimCut * s;
  if (w > 5e6L) throw LatticeError("one-dimensional Gaussian window too wide");
  return {static_cast<std::int64_t>(std::floor(c - w)) - 1, static_cast<std::int64_t>(std::ceil(c + w)) + 1};
}

Real rho_z(Real s, Real c) {
  const ZWindow win = z_window(s, c);
  Real tot = 0;
  for (std::int64_t k = win.lo; k <= win.hi; ++k) {
    const Real d = static_cast<Real>(k) - c;
    tot += std::exp(-kPi * d * d / (s * s));
  }
  return tot;
}

// Draws k ~ D_{Z,s,c}; returns the window mass through `mass`.
std::int64_t sample_z(Real s, Real c, Rng& rng, Real& mass, std::vector<Real>& scratch) {
  const ZWindow win = z_window(s, c);
  scratch.clear();
  Real tot = 0;
  for (std::int64_t k = win.lo; k <= win.hi; ++k) {
    const Real d = static_cast<Real>(k) - c;
    tot += std::exp(-kPi * d * d / (s * s));
    scratch.push_back(tot);
  }
  mass = tot;
  const Real u = rng.uniform() * tot;
  const auto it = std::upper_bound(scratch.begin(), scratch.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - scratch.begin(), static_cast<std::ptrdiff_t>(scratch.size()) - 1);
  return win.lo + idx;
}

Real ball_volume(std::size_t n, Real r) {
  const Real nn = static_cast<Real>(n);
  return std::exp((nn / 2) * std::log(kPi) - std::lgamma(nn / 2 + 1) + nn * std::log(r));
}

}  // namespace

DgsSampleSet sample_discrete_gaussian(const LatticeBasis& basis, Real s, std::size_t count, std::uint64_t seed,
                                      const SamplerOptions& opts) {
  if (!(s > 0)) throw DomainError("Gaussian parameter must be positive");
  const std::size_t n = basis.rank();
  DgsSampleSet out;
  out.basis = basis;
  out.parameter_s = s;
  out.seed = seed;
  out.coefficients.reserve(count);
  if (n == 0) {
    out.coefficients.assign(count, Coefficients{});
    out.mass_covered = 1;
    out.method = "table";
    return out;
  }

  const Real floor_mass = std::ldexp(Real(1), -40);
  const Real r = tail_radius(n, 0, floor_mass) * s;
  const Real est = ball_volume(n, r) / std::sqrt(to_real(basis.det2()));
  bool table = opts.method == SamplerOptions::Method::Table ||
               (opts.method == SamplerOptions::Method::Auto && est <= static_cast<Real>(opts.table_limit));

  if (table) {
    out.method = "table";
    Enumerator e(basis);
    std::vector<Coefficients> pts;
    std::vector<Real> cdf;
    Real tot = 0;
    e.run(RealVec::Zero(static_cast<Eigen::Index>(basis.ambient_dim())), r * r,
          [&](const std::int64_t* red, Real d2, Real&) {
            tot += std::exp(-kPi * d2 / (s * s));
            cdf.push_back(tot);
            pts.push_back(e.original_coefficients(red));
          });
    out.mass_covered = 1 - tail_factor(n, 0, r / s);
    for (std::size_t i = 0; i < count; ++i) {
      Rng rng(seed, i);
      const Real u = rng.uniform() * tot;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      auto idx = std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1);
      out.coefficients.push_back(pts[static_cast<std::size_t>(idx)]);
    }
    return out;
  }

  // Klein's sequential proposal on the reduced basis, corrected by rejection:
  // proposal mass is rho_s(y) / prod_i rho_{s_i}(Z - c_i), and accepting with
  // prod_i rho_{s_i}(Z - c_i) / rho_{s_i}(Z) leaves exactly rho_s(y) / rho_s(L).
  out.method = "klein-rejection";
  const ReducedForm& red = basis.reduced();
  const RealVec& bn = red.basis->real_gs_norm2();
  const RealMat& mu = red.basis->real_mu();
  std::vector<Real> si(n), full(n);
  for (std::size_t i = 0; i < n; ++i) {
    si[i] = s / std::sqrt(bn(static_cast<Eigen::Index>(i)));
    full[i] = rho_z(si[i], 0);
  }
  std::vector<Real> scratch;
  std::vector<std::int64_t> x(n);
  std::uint64_t proposals = 0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    Rng rng(seed, idx);
    for (;;) {
      ++proposals;
      Real ratio = 1;
      for (std::size_t ii = n; ii-- > 0;) {
        Real c = 0;
        for (std::size_t j = ii + 1; j < n; ++j)
          c -= mu(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(ii)) * static_cast<Real>(x[j]);
        Real mass = 0;
        x[ii] = sample_z(si[ii], c, rng, mass, scratch);
        ratio *= std::min<Real>(1, mass / full[ii]);
      }
      if (rng.uniform() < ratio) break;
    }
    Coefficients c(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] != 0)
        for (std::size_t j = 0; j < n; ++j) c[j] = checked_add(c[j], checked_mul(x[i], red.transform[i][j]));
    out.coefficients.push_back(std::move(c));
  }
  // Window truncation loses < 2^-78 (generously) of each one-dimensional mass.
  const Real accept = count ? static_cast<Real>(count) / static_cast<Real>(proposals) : 1;
  out.mass_covered = 1 - static_cast<Real>(n) * std::ldexp(Real(1), -78) / accept;
  return out;
}

}  // namespace latgauss
