#include "doctest.h"
#include "latgauss/reductions.hpp"
#include "test_helpers.hpp"

#include <set>

using namespace latgauss;
using testutil::random_integer_basis;
using testutil::random_target;

namespace {

// factor^2 * dist^2 compared exactly, factor^2 supplied as a rational
bool within(const Rational& got2, const Rational& factor2, const Rational& dist2) { return got2 <= factor2 * dist2; }

Rational sq(Real x) { return to_rational(x) * to_rational(x); }

LatticeBasis diagonal(const std::vector<long long>& d) {
  std::vector<std::vector<long long>> rows(d.size(), std::vector<long long>(d.size(), 0));
  for (std::size_t i = 0; i < d.size(); ++i) rows[i][i] = d[i];
  return LatticeBasis::from_integers(rows);
}

// i_{k+1} as the minimal i < i_k with |b~_{i+1}| >= max_{j<=i_k} |b~_j| / c
std::vector<std::size_t> indices_by_min_form(const LatticeBasis& b, const Rational& c2) {
  const auto& bn = b.gram_schmidt().norm2;
  std::vector<std::size_t> out{b.rank()};
  while (out.back() > 0) {
    Rational m = 0;
    for (std::size_t j = 0; j < out.back(); ++j) m = std::max(m, bn[j]);
    std::size_t i = 0;
    while (i < out.back() && bn[i] * c2 < m) ++i;
    out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("gamma prime: constant inner factor and the balanced choice") {
  CHECK(kannan_gamma_prime(8, 0.5L, [](std::size_t) { return Real(1); }) == doctest::Approx(std::sqrt(8.0)));
  for (Real a : {0.1L, 0.25L, 0.5L})
    for (std::size_t n : {1u, 5u, 12u}) {
      auto g = [a](std::size_t k) { return std::sqrt(static_cast<Real>(k)) / (2 * a); };
      CHECK(std::fabs(kannan_gamma_prime(n, a, g) - g(n)) <= 1e-15L * g(n));
    }
  CHECK(master_gamma_prime(9, 2, 0.5L) == doctest::Approx(6.0));
}

TEST_CASE("Kannan reduction with exact and adversarial inner solvers") {
  std::mt19937_64 rng(1);
  const ExactInner exact;
  const PromiseAdversaryInner adv(0.5L, 1);
  for (int inst = 0; inst < 4; ++inst) {
    auto b = random_integer_basis(6, rng, 10);
    for (const InnerSolver* inner : {static_cast<const InnerSolver*>(&exact), static_cast<const InnerSolver*>(&adv)}) {
      auto a = kannan_preprocess(b, *inner);
      CHECK(a.per_level.size() == 7);
      CHECK(is_hkz(a.hkz));
      CHECK(same_lattice(a.hkz, b));
      for (int k = 0; k < 10; ++k) {
        auto t = random_target(6, rng, 20, 16);
        auto r = kannan_reduce(a, t);
        REQUIRE(r.found);
        CHECK(b.contains(r.vector));
        CHECK(within(r.dist2, Rational(6), dist2_to_lattice(b, t)));
        for (const auto& c : r.candidates)
          if (c.ok) CHECK(c.dist2 == c.projected2 + c.babai2);
      }
      auto y = b.combine({1, -2, 0, 3, 1, -1});
      CHECK(kannan_reduce(a, y).vector == y);
    }
  }
}

TEST_CASE("Kannan reduction over the gradient-ascent decoder") {
  std::mt19937_64 rng(2);
  const Real alpha = 0.15L;
  const std::size_t n = 5;
  const auto plan = bdd_param_plan(alpha, n);
  const BddInner bdd(plan.eps, 2, 9);
  auto b = random_integer_basis(n, rng, 6);
  auto a = kannan_preprocess(b, bdd);
  const Rational f2 = sq(std::sqrt(static_cast<Real>(n)) / (2 * alpha));
  for (int k = 0; k < 10; ++k) {
    auto t = random_target(n, rng, 10, 16);
    auto r = kannan_reduce(a, t);
    REQUIRE(r.found);
    CHECK(b.contains(r.vector));
    CHECK(within(r.dist2, f2, dist2_to_lattice(b, t)));
  }
}

TEST_CASE("master indices") {
  CHECK(master_indices(LatticeBasis::identity(6), 2) == std::vector<std::size_t>{6, 0});
  // |b~_j| = 4^j: each step drops exactly one index
  CHECK(master_indices(diagonal({4, 16, 64, 256, 1024}), 2) == std::vector<std::size_t>{5, 4, 3, 2, 1, 0});
  // |b~_j| = 2^(n-j): the prefix maximum is attained at j = 1, so one jump
  CHECK(master_indices(diagonal({16, 8, 4, 2, 1}), 2) == std::vector<std::size_t>{5, 0});
  // |b~_j| = 2^j with c = 2 skips every other index
  CHECK(master_indices(diagonal({2, 4, 8, 16, 32, 64}), 2) == std::vector<std::size_t>{6, 4, 2, 0});
  std::mt19937_64 rng(3);
  for (int inst = 0; inst < 4; ++inst) {
    auto b = random_integer_basis(7, rng, 10);
    for (Real c : {1.0L, 1.5L, 2.0L, 3.0L}) CHECK(master_indices(b, c) == indices_by_min_form(b, sq(c)));
  }
}

TEST_CASE("master preprocessing dimensions on HKZ bases") {
  std::mt19937_64 rng(4);
  const std::size_t n = 8;
  const std::size_t h2 = static_cast<std::size_t>(std::floor(std::log2(static_cast<Real>(n)) / 2)) + 1;
  const ExactInner exact;
  for (int inst = 0; inst < 3; ++inst) {
    auto b = random_integer_basis(n, rng, 10);
    auto m1 = master_preprocess(b, 1, 0, exact);
    CHECK(m1.total_dimension() == n);
    auto m2 = master_preprocess(b, 2, h2, exact);
    CHECK(m2.total_dimension() <= n * (h2 + 1));
    // interleaving sandwich, squared
    const auto& bn = m2.hkz.gram_schmidt().norm2;
    for (std::size_t k = 0; k + 1 < m2.indices.size(); ++k) {
      Rational mx = 0;
      for (std::size_t j = 0; j < m2.indices[k]; ++j) mx = std::max(mx, bn[j]);
      const Rational nxt = bn[m2.indices[k + 1]];
      CHECK(mx <= Rational(4) * nxt);
      CHECK(nxt <= mx);
    }
  }
  CHECK_THROWS_AS(master_preprocess(LatticeBasis::identity(4), 8, 3, exact), DomainError);
}

TEST_CASE("master reduction guarantees") {
  std::mt19937_64 rng(5);
  const ExactInner exact;
  for (int inst = 0; inst < 3; ++inst) {
    auto b = random_integer_basis(6, rng, 10);
    // g = 1, h = 0: inner factor 1/(2 alpha) = 1 at alpha = 1/2
    const PromiseAdversaryInner adv(0.5L, 1);
    for (const InnerSolver* inner : {static_cast<const InnerSolver*>(&exact), static_cast<const InnerSolver*>(&adv)}) {
      auto m = master_preprocess(b, 1, 0, *inner);
      for (int k = 0; k < 8; ++k) {
        auto t = random_target(6, rng, 20, 16);
        auto r = master_reduce(m, t);
        REQUIRE(r.found);
        CHECK(b.contains(r.vector));
        CHECK(within(r.dist2, Rational(6), dist2_to_lattice(b, t)));
        for (const auto& c : r.candidates)
          if (c.ok) CHECK(c.dist2 == c.projected2 + c.babai2);
      }
      auto y = b.combine({0, 1, 1, -1, 2, 0});
      CHECK(master_reduce(m, y).vector == y);
    }
    // g = 2, h = 2: inner factor g^h/(2 alpha) = 4, guarantee g sqrt(n)/(2 alpha)
    const PromiseAdversaryInner adv4(0.5L, 4);
    auto m = master_preprocess(b, 2, 2, adv4);
    for (int k = 0; k < 5; ++k) {
      auto t = random_target(6, rng, 20, 16);
      auto r = master_reduce(m, t);
      REQUIRE(r.found);
      CHECK(within(r.dist2, sq(master_gamma_prime(6, 2, 0.5L)), dist2_to_lattice(b, t)));
    }
  }
}

TEST_CASE("promise reduction without preprocessing") {
  std::mt19937_64 rng(6);
  const ExactInner exact;
  const PromiseAdversaryInner adv(1, 1);
  for (int inst = 0; inst < 3; ++inst) {
    auto b = random_integer_basis(6, rng, 10);
    auto h = g_hkz_basis(b, adv);
    CHECK(is_hkz(h));
    CHECK(same_lattice(h, b));
    for (const InnerSolver* inner : {static_cast<const InnerSolver*>(&exact), static_cast<const InnerSolver*>(&adv)}) {
      for (int k = 0; k < 4; ++k) {
        auto t = random_target(6, rng, 20, 16);
        auto r = cvp_promise_reduce(b, t, *inner);
        REQUIRE(r.found);
        CHECK(b.contains(r.vector));
        CHECK(4 * r.dist2 <= Rational(9) * dist2_to_lattice(b, t));
      }
      auto y = b.combine({2, 0, -1, 0, 0, 1});
      CHECK(cvp_promise_reduce(b, y, *inner).vector == y);
    }
  }
  // a g = 3/2 adversary still yields a 3/2-HKZ basis
  const PromiseAdversaryInner loose(1, 1.5L);
  auto b = random_integer_basis(5, rng, 10);
  CHECK(is_hkz(g_hkz_basis(b, loose), 1.5L));
  CHECK(is_hkz(g_hkz_basis(LatticeBasis::identity(4), adv)));
}

TEST_CASE("primality") {
  std::vector<bool> sieve(100000, true);
  sieve[0] = sieve[1] = false;
  for (std::size_t i = 2; i * i < sieve.size(); ++i)
    if (sieve[i])
      for (std::size_t j = i * i; j < sieve.size(); j += i) sieve[j] = false;
  for (std::uint64_t k = 0; k < sieve.size(); ++k) CHECK(is_prime(k) == sieve[k]);
  CHECK(is_prime((std::uint64_t(1) << 61) - 1));
  CHECK(is_prime(18446744073709551557ULL));
  CHECK_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
  CHECK_FALSE(is_prime(3825123056546413051ULL));
  CHECK(next_prime(24) == 29);
  CHECK(next_prime(29) == 29);
  CHECK(mod_inverse(3, 11) == 4);
}

TEST_CASE("sparse cosets: membership, index and coset point") {
  std::mt19937_64 rng(7);
  auto b = random_integer_basis(4, rng, 10);
  const std::uint64_t p = 11;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto s = sparse_coset_sample(b, p, seed);
    auto sub0 = s.sublattice();
    for (std::size_t i = 0; i < 4; ++i) {
      Coefficients e(4, 0);
      e[i] = static_cast<std::int64_t>(p);
      CHECK(s.residue(e) == 0);
      CHECK(sub0.contains(b.combine(e)));
      CHECK(s.residue(*b.coefficients(sub0.row(i))) == 0);
    }
    CHECK(sub0.det2() == Rational(static_cast<long long>(p * p)) * b.det2());
    CHECK(s.residue(s.coset_point()) == s.c);
    CHECK(s.contains(b.combine(s.coset_point())));
    // counting residues over the box {0..p-1}^4 gives p classes of size p^3
    std::vector<std::size_t> counts(p, 0);
    Coefficients x(4, 0);
    for (std::uint64_t code = 0; code < p * p * p * p; ++code) {
      std::uint64_t c = code;
      for (auto& v : x) {
        v = static_cast<std::int64_t>(c % p);
        c /= p;
      }
      ++counts[s.residue(x)];
    }
    for (auto cnt : counts) CHECK(cnt == p * p * p);
  }
  CHECK_THROWS_AS(sparse_coset_sample(b, 12, 0), DomainError);
}

TEST_CASE("short-coset lemma: both bounds on a rank-5 fixture") {
  std::mt19937_64 rng(8);
  auto b = random_integer_basis(5, rng, 6);
  const Rational l1 = lambda1_squared(b);
  const Rational r2 = Rational(9, 4) * l1;
  auto pts = enumerate_coefficients(b, zero_vector(5), r2);
  const std::size_t N = pts.size();
  REQUIRE(N > 5);
  const std::uint64_t p = next_prime(2 * N);
  REQUIRE(p <= 8 * N);
  const int draws = 2000;
  int short_hits = 0, small10 = 0, small25 = 0;
  for (int d = 0; d < draws; ++d) {
    auto s = sparse_coset_sample(b, p, 5000 + d);
    std::set<std::uint64_t> C;
    bool hit = false;
    for (const auto& x : pts) {
      const auto res = s.residue(x);
      C.insert(res);
      if (res == 0 && std::any_of(x.begin(), x.end(), [](auto v) { return v != 0; })) hit = true;
    }
    short_hits += hit;
    const Real thresh = static_cast<Real>(N) * p / static_cast<Real>(p + N - 1);
    small10 += static_cast<Real>(C.size()) <= 0.10L * thresh;
    small25 += static_cast<Real>(C.size()) <= 0.25L * thresh;
  }
  auto bound = [&](Real q) { return q + 3 * std::sqrt(q * (1 - q) / draws); };
  CHECK(static_cast<Real>(short_hits) / draws <= bound(static_cast<Real>(N) / p));
  CHECK(static_cast<Real>(small10) / draws <= bound(0.10L));
  CHECK(static_cast<Real>(small25) / draws <= bound(0.25L));
}

TEST_CASE("sparsification geometric step and end to end") {
  std::mt19937_64 rng(9);
  const Real tau = 1;
  auto b = random_integer_basis(5, rng, 6);
  auto t = random_target(5, rng, 10, 8);
  const LatticePoint x = cvp_oracle_full(b, t);
  const Rational dist2 = x.norm2;
  const Rational r2 = dist2;  // tau = 1
  auto ball = enumerate_coefficients(b, zero_vector(5), r2);
  const std::uint64_t p = next_prime(2 * ball.size());
  const RationalVector xt = sub(x.vector, t);
  int good = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto s = sparse_coset_sample(b, p, seed);
    const std::uint64_t rx = s.residue(x.coefficients);
    for (std::uint64_t c = 0; c < p; ++c) {
      // y_c = x - d with d the shortest ball vector of residue rx - c,
      // ties broken towards larger <d, x - t>
      std::optional<RationalVector> best;
      Rational best2, bestip;
      for (const auto& dc : ball) {
        if (s.residue(dc) != (rx + p - c) % p) continue;
        RationalVector d = b.combine(dc);
        Rational d2 = norm2(d), ip = dot(d, xt);
        if (!best || d2 < best2 || (d2 == best2 && ip > bestip)) {
          best = d;
          best2 = d2;
          bestip = ip;
        }
      }
      ++total;
      if (!best || bestip < 0) continue;
      ++good;
      const RationalVector yc = sub(x.vector, *best);
      CHECK(norm2(sub(yc, t)) <= (1 + sq(tau)) * dist2);
    }
  }
  CHECK(good > 0);

  const PromiseAdversaryInner adv(std::sqrt(1 + 1 / (tau * tau)), 1);
  SparsifyOptions o;
  o.trials = 50;
  auto y = b.combine({1, 0, 0, -1, 2});
  auto onl = sparsify_reduce(b, y, tau, adv, 3, o);
  REQUIRE(onl.found);
  CHECK(onl.vector == y);
  o.trials = 1500;
  for (std::uint64_t run = 0; run < 3; ++run) {
    auto r = sparsify_reduce(b, t, tau, adv, 100 + run, o);
    REQUIRE(r.found);
    CHECK(b.contains(r.vector));
    CHECK(r.dist2 <= (1 + sq(tau)) * dist2);
  }
  SparsifyOptions paper;
  paper.mode = SparsifyOptions::Mode::Paper;
  paper.trials = 40;
  paper.prime_budget = 8;
  auto pr = sparsify_reduce(b, t, tau, adv, 11, paper);
  CHECK(pr.primes.size() == 8);
  for (std::size_t i = 0; i < pr.primes.size(); ++i) {
    CHECK(pr.primes[i] > (std::uint64_t(1) << (i + 1)));
    CHECK(pr.primes[i] <= (std::uint64_t(1) << (i + 2)));
  }
  REQUIRE(pr.found);
  CHECK(pr.dist2 <= (1 + sq(tau)) * dist2);
}

TEST_CASE("sparsification handles rational lattices by clearing denominators") {
  auto b = LatticeBasis::identity(3).scaled_by(Rational(1, 3));
  RationalVector t{Rational(1, 10), Rational(2, 7), Rational(-1, 5)};
  const ExactInner exact;
  SparsifyOptions o;
  o.trials = 400;
  auto r = sparsify_reduce(b, t, 1, exact, 5, o);
  REQUIRE(r.found);
  CHECK(b.contains(r.vector));
  CHECK(r.dist2 <= 2 * dist2_to_lattice(b, t));
}
