#include "doctest.h"
#include "latgauss/enumeration.hpp"
#include "latgauss/generators.hpp"

using namespace latgauss;

namespace {

bool is_identity(const RationalMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m[i][j] != Rational(i == j ? 1 : 0)) return false;
  return true;
}

RationalMatrix gram(const RationalMatrix& q) {
  RationalMatrix g(q.size(), RationalVector(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) g[i][j] = dot(q[i], q[j]);
  return g;
}

}  // namespace

TEST_CASE("generator names round-trip") {
  for (auto k : {GeneratorKind::Identity, GeneratorKind::Checkerboard, GeneratorKind::RandomInteger,
                 GeneratorKind::RandomDualOrthogonal})
    CHECK(parse_generator_kind(to_string(k)) == k);
  CHECK(parse_generator_kind("identity") == GeneratorKind::Identity);
  CHECK_THROWS(parse_generator_kind("hexagonal"));
}

TEST_CASE("identity and checkerboard") {
  CHECK(generate_lattice({GeneratorKind::Identity, 5}, 7) == LatticeBasis::identity(5));

  for (std::size_t n : {2u, 3u, 5u}) {
    const LatticeBasis d = generate_lattice({GeneratorKind::Checkerboard, n}, 1);
    CHECK(d.det2() == Rational(4));  // index 2 in Z^n
    // membership is exactly "even coordinate sum"
    for (std::size_t i = 0; i < n; ++i) {
      RationalVector e(n, Rational(0));
      e[i] = 1;
      CHECK_FALSE(d.contains(e));
      if (i + 1 < n) {
        e[i + 1] = 1;
        CHECK(d.contains(e));
      }
    }
    CHECK(lambda1_squared(d) == Rational(2));
  }
}

TEST_CASE("random-integer: full rank, bounded entries, seed-deterministic") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const LatticeGeneratorSpec spec{GeneratorKind::RandomInteger, 4, 3};
    const LatticeBasis b = generate_lattice(spec, seed);
    CHECK(b.rank() == 4);
    CHECK(b.det2() > 0);
    for (const auto& r : b.vectors())
      for (const auto& x : r) CHECK(abs(x) <= 3);
    CHECK(generate_lattice(spec, seed) == b);
  }
  CHECK_FALSE(generate_lattice({GeneratorKind::RandomInteger, 4}, 1) ==
              generate_lattice({GeneratorKind::RandomInteger, 4}, 2));
}

TEST_CASE("cayley transform of a skew matrix is orthogonal") {
  const RationalMatrix s{{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}};
  const RationalMatrix q = cayley_orthogonal(s);
  CHECK(is_identity(gram(q)));
  CHECK(is_identity(cayley_orthogonal(RationalMatrix(3, RationalVector(3, Rational(0))))));
}

TEST_CASE("random-dual-orthogonal: det and dual lattice match the scales") {
  const LatticeGeneratorSpec spec{GeneratorKind::RandomDualOrthogonal, 4, 5};
  for (std::uint64_t seed : {1u, 9u}) {
    const LatticeBasis b = generate_lattice(spec, seed);
    const auto d = dual_orthogonal_scales(spec, seed);
    REQUIRE(d.size() == 4);
    Rational prod = 1;
    long long dmax = 0;
    for (long long x : d) {
      CHECK(x >= 1);
      CHECK(x <= 5);
      prod *= Rational(x * x);
      dmax = std::max(dmax, x);
    }
    CHECK(b.det2() == prod);
    // The dual has an orthogonal basis q_i / d_i, so lambda1(L*)^2 = 1 / max d_i^2.
    CHECK(lambda1_squared(b.dual()) == Rational(1, dmax * dmax));
    CHECK(generate_lattice(spec, seed) == b);
  }
}
