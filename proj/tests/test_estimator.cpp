#include "doctest.h"
#include "latgauss/estimator.hpp"
#include "test_helpers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <sstream>

using namespace latgauss;
using testutil::random_integer_basis;

namespace {

Real theta(Real s, int K = 80) {
  Real tot = 0;
  for (int k = -K; k <= K; ++k) tot += std::exp(-kPi * k * k / (s * s));
  return tot;
}

RealVec random_real(std::size_t m, std::mt19937_64& rng, Real range) {
  std::uniform_real_distribution<double> d(-static_cast<double>(range), static_cast<double>(range));
  RealVec v(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = d(rng);
  return v;
}

RealVec random_in_ball(std::size_t m, std::mt19937_64& rng, Real radius) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  RealVec v(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g(rng);
  return v.normalized() * radius * std::pow(static_cast<Real>(u(rng)), 1 / static_cast<Real>(m));
}

Real spectral(const RealMat& h) {
  Eigen::SelfAdjointEigenSolver<RealMat> es(h);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Real quantile99(std::vector<Real> v) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(0.99 * static_cast<double>(v.size() - 1))];
}

// Independent membership: <w, b_j> integral for every basis row b_j.
bool in_dual(const RationalVector& w, const LatticeBasis& b) {
  for (std::size_t j = 0; j < b.rank(); ++j) {
    Rational ip = dot(w, b.row(j));
    if (denominator(ip) != 1) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("advice vectors lie in the dual lattice and are reproducible") {
  std::mt19937_64 rng(1);
  auto b = random_integer_basis(3, rng, 5);
  auto a = generate_advice(b, 1e-4L, 300, 42);
  auto a2 = generate_advice(b, 1e-4L, 300, 42);
  CHECK(a.N() == 300);
  CHECK(a.coefficients == a2.coefficients);
  for (std::size_t i = 0; i < a.N(); ++i) CHECK(in_dual(a.exact(i), b));
  CHECK_THROWS_AS(generate_advice(b, Real(1) / 200, 10, 1), DomainError);
  CHECK_THROWS_AS(generate_advice(b, 1e-4L, 0, 1), DomainError);
}

TEST_CASE("zero-vector frequency of Z^n advice matches the direct rho ratio") {
  const std::size_t n = 3, N = 40000;
  const Real eps = 1e-4L;
  auto z = LatticeBasis::identity(n);
  const Real eta = smoothing_parameter(z, eps).eta;
  auto a = generate_advice(z, eps, N, 7, 1, eta);
  std::size_t zeros = 0;
  for (const auto& c : a.coefficients) zeros += std::all_of(c.begin(), c.end(), [](auto x) { return x == 0; });
  // direct series for rho_eta(Z^n), against the Poisson form eta^n (1 + eps)
  const Real p0 = 1 / std::pow(theta(eta), static_cast<Real>(n));
  CHECK(std::fabs(p0 * std::pow(eta, static_cast<Real>(n)) * (1 + eps) - 1) <= 1e-9L);
  const Real sigma = std::sqrt(std::max<Real>(p0 * (1 - p0), 1e-12L) / N);
  CHECK(std::fabs(static_cast<Real>(zeros) / N - p0) <= 5 * sigma + 1.0L / N);
}

TEST_CASE("f_W range, origin value and lattice periodicity") {
  std::mt19937_64 rng(2);
  auto b = random_integer_basis(4, rng, 5);
  const Real scale = 1.7L;
  auto a = generate_advice(b, 1e-3L, 500, 3, scale);
  CHECK(f_W(a, RealVec::Zero(4)) == 1);
  CHECK(grad_f_W(a, RealVec::Zero(4)).norm() == 0);
  CHECK(gradient_step(a, RealVec::Zero(4)).norm() == 0);
  for (int k = 0; k < 40; ++k) {
    RealVec t = random_real(4, rng, 3);
    const Real v = f_W(a, t);
    CHECK(v >= -1);
    CHECK(v <= 1);
    Coefficients y{1, -2, 0, 3};
    RealVec ys = to_real(b.combine(y)) * scale;
    CHECK(std::fabs(f_W(a, RealVec(t + ys)) - v) <= 1e-12L);
    CHECK((grad_f_W(a, RealVec(t + ys)) - grad_f_W(a, t)).norm() <= 1e-12L);
    CHECK((hessian_f_W(a, RealVec(t + ys)) - hessian_f_W(a, t)).norm() <= 1e-11L);
  }
}

TEST_CASE("gradient and Hessian match central differences") {
  std::mt19937_64 rng(4);
  auto b = random_integer_basis(3, rng, 4);
  auto a = generate_advice(b, 1e-3L, 400, 9);
  const Real h = 1e-6L;
  for (int k = 0; k < 10; ++k) {
    RealVec t = random_real(3, rng, 1);
    RealVec g = grad_f_W(a, t);
    RealMat H = hessian_f_W(a, t);
    CHECK((H - H.transpose()).norm() == 0);
    for (Eigen::Index i = 0; i < 3; ++i) {
      RealVec tp = t, tm = t;
      tp(i) += h;
      tm(i) -= h;
      const Real fd = (f_W(a, tp) - f_W(a, tm)) / (2 * h);
      CHECK(std::fabs(fd - g(i)) <= 1e-8L * std::max<Real>(1, g.norm()));
      RealVec gd = (grad_f_W(a, tp) - grad_f_W(a, tm)) / (2 * h);
      CHECK((gd - H.col(i)).norm() <= 1e-8L * std::max<Real>(1, spectral(H)));
    }
  }
}

TEST_CASE("Hessian at the origin: Gram form, concentration, and dominance") {
  const std::size_t n = 3;
  const Real eps = 1e-4L;
  auto z = LatticeBasis::identity(n);
  const Real eta = smoothing_parameter(z, eps).eta;
  // scaled so that the advice sees a lattice with eta_eps(dual) = 1
  auto a = generate_advice(z, eps, 40000, 11, eta, eta);
  RealMat h0 = hessian_f_W(a, RealVec::Zero(n));
  Eigen::SelfAdjointEigenSolver<RealMat> es(h0);
  CHECK(es.eigenvalues().maxCoeff() <= 0);
  RealMat gram = RealMat::Zero(n, n);
  for (std::size_t i = 0; i < a.N(); ++i) gram += a.row(i) * a.row(i).transpose();
  CHECK((h0 + 4 * kPi * kPi / a.N() * gram).norm() <= 1e-13L * gram.norm());
  const Real delta = 4 * kPi * eps / (1 + eps) * (std::log(2 * (1 + eps) / eps) + 1);
  const Real s = 0.5L;  // sampling slack at N = 40000
  CHECK(spectral(RealMat(h0 + 2 * kPi * RealMat::Identity(n, n))) <= delta + s);
  std::mt19937_64 rng(5);
  const Real n0 = spectral(h0);
  for (int k = 0; k < 20; ++k) CHECK(spectral(hessian_f_W(a, random_real(n, rng, 2))) <= n0 * (1 + 1e-15L));
}

TEST_CASE("estimator error quantiles shrink as N doubles") {
  std::mt19937_64 rng(6);
  auto b = random_integer_basis(3, rng, 4);
  const Real eps = 1e-3L;
  const Real eta = smoothing_parameter(b.dual(), eps).eta;
  auto scaled = b.scaled_by(to_rational(static_cast<double>(eta)));
  const Real scale = to_real(to_rational(static_cast<double>(eta)));
  RealVec t = random_real(3, rng, 0.3L);
  auto exact = derivatives_f(scaled, t, 1e-12L);
  Real prev_f = 10, prev_g = 10;
  for (std::size_t N : {50u, 100u, 200u, 400u, 800u}) {
    std::vector<Real> ef, eg;
    for (std::uint64_t draw = 0; draw < 200; ++draw) {
      auto a = generate_advice(b, eps, N, 1000 * N + draw, scale, eta);
      auto e = evaluate_f_W(a, t);
      ef.push_back(std::fabs(e.value - exact.value.value));
      eg.push_back((e.gradient - exact.gradient.value).norm() / t.norm());
    }
    const Real qf = quantile99(ef), qg = quantile99(eg);
    CHECK(qf < prev_f);
    CHECK(qg < prev_g);
    prev_f = qf;
    prev_g = qg;
  }
}

TEST_CASE("gradient step on an isolated peak lands on the lattice point") {
  // L = 10 Z, W a stratified draw of D_{L*}: the M midpoint quantiles of the
  // discrete Gaussian on Z/10, so moments of W match within about 1/M.
  const std::size_t n = 1, M = 100000;
  auto l = LatticeBasis::identity(n).scaled_by(Rational(10));
  auto dual = l.dual();
  std::vector<long long> ks;
  std::vector<Real> cdf;
  Real tot = 0;
  for (long long k = -80; k <= 80; ++k) {
    tot += std::exp(-kPi * (k / 10.0L) * (k / 10.0L));
    ks.push_back(k);
    cdf.push_back(tot);
  }
  std::vector<long long> q(M);
  for (std::size_t i = 0; i < M; ++i) {
    const Real u = (static_cast<Real>(i) + 0.5L) / M * tot;
    q[i] = ks[static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin())];
  }
  std::vector<Coefficients> coeffs;
  for (auto x : q) coeffs.push_back({x});
  auto a = make_advice(dual, coeffs, 1e-4L, 0, 1);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    RealVec t = random_in_ball(n, rng, 0.5L);
    // exact-sum oracle: interference from other peaks is below e^{-25 pi}
    auto d = derivatives_f_primal(l, t, 1e-15L);
    RealVec exact_step = t + d.gradient.value / (2 * kPi * d.value.value);
    CHECK(exact_step.norm() <= 1e-12L * t.norm());
    CHECK(gradient_step(a, t).norm() <= 1e-3L * t.norm());
  }
}

TEST_CASE("one ascent step contracts on normalized lattices") {
  const Real eps = 1e-4L;
  const auto sd = s_eps_delta_max(eps);
  std::mt19937_64 rng(9);
  std::vector<LatticeBasis> lattices{LatticeBasis::identity(4), random_integer_basis(4, rng, 4),
                                     random_integer_basis(4, rng, 6)};
  for (const auto& b : lattices) {
    const std::size_t n = b.rank();
    const Real eta = smoothing_parameter(b.dual(), eps).eta;
    const auto N = static_cast<std::size_t>(std::ceil(2 * n * std::log(1 / eps) / std::sqrt(eps)));
    auto a = generate_advice(b, eps, N, 77, eta, eta);
    int fails = 0;
    const int trials = 1000;
    for (int k = 0; k < trials; ++k) {
      RealVec t = random_in_ball(n, rng, sd.delta_max * sd.s_eps);
      const Real delta = std::max<Real>(0.125L, t.norm() / sd.s_eps);
      RealVec s = gradient_step(a, t);
      if (s.norm() > std::pow(eps, (1 - 2 * delta) / 4) * t.norm()) ++fails;
    }
    CHECK(fails <= trials / 100);
  }
}

TEST_CASE("contraction factor at the maximal radius is at most one half") {
  for (int k = 8; k <= 200; ++k) {
    const Real eps = std::ldexp(Real(1), -k) * 1.5L;
    if (!(eps < Real(1) / 200)) continue;
    const auto sd = s_eps_delta_max(eps);
    CHECK(std::pow(eps, (1 - 2 * sd.delta_max) / 4) <= 0.5L);
  }
}

TEST_CASE("denominator guard and advice file round trip") {
  std::mt19937_64 rng(10);
  auto b = random_integer_basis(3, rng, 4);
  auto a = generate_advice(b, 1e-4L, 200, 5, 1.25L);
  CHECK_THROWS_AS(gradient_step(a, RealVec::Zero(3), 1.5L), DenominatorTooSmallError);
  std::stringstream ss;
  write_advice(ss, a);
  auto r = read_advice(ss, b);
  CHECK(r.coefficients == a.coefficients);
  CHECK(r.eps == a.eps);
  CHECK(r.seed == a.seed);
  CHECK(r.source_scale == a.source_scale);
  for (int k = 0; k < 5; ++k) {
    RealVec t = random_real(3, rng, 1);
    CHECK(f_W(r, t) == f_W(a, t));
  }
}
