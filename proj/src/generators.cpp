#include "latgauss/generators.hpp"
#include "latgauss/rng.hpp"

namespace latgauss {

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "integer-identity" || name == "identity") return GeneratorKind::Identity;
  if (name == "checkerboard") return GeneratorKind::Checkerboard;
  if (name == "random-integer") return GeneratorKind::RandomInteger;
  if (name == "random-dual-orthogonal") return GeneratorKind::RandomDualOrthogonal;
  throw DomainError("unknown lattice generator '" + name + "'");
}

std::string to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::Identity: return "integer-identity";
    case GeneratorKind::Checkerboard: return "checkerboard";
    case GeneratorKind::RandomInteger: return "random-integer";
    case GeneratorKind::RandomDualOrthogonal: return "random-dual-orthogonal";
  }
  return "?";
}

namespace {

std::int64_t uniform_in(Rng& rng, long long lo, long long hi) {
  return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

RationalMatrix inverse(RationalMatrix a) {
  const std::size_t n = a.size();
  RationalMatrix inv(n, RationalVector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw RankDeficientError("singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const Rational piv = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= piv;
      inv[c][j] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c];
      axpy(a[r], -f, a[c]);
      axpy(inv[r], -f, inv[c]);
    }
  }
  return inv;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
  RationalMatrix out(n, RationalVector(m, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      if (a[i][l] != 0) axpy(out[i], a[i][l], b[l]);
  return out;
}

}  // namespace

RationalMatrix cayley_orthogonal(const RationalMatrix& skew) {
  const std::size_t n = skew.size();
  RationalMatrix plus(n, RationalVector(n)), minus(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rational id = i == j ? 1 : 0;
      plus[i][j] = id + skew[i][j];
      minus[i][j] = id - skew[i][j];
    }
  // I + S is invertible for every real skew S
  return multiply(minus, inverse(plus));
}

std::vector<long long> dual_orthogonal_scales(const LatticeGeneratorSpec& spec, std::uint64_t seed) {
  if (spec.bound < 1) throw DomainError("random-dual-orthogonal needs bound >= 1");
  Rng rng(seed, 0);
  std::vector<long long> d(spec.n);
  for (auto& x : d) x = uniform_in(rng, 1, spec.bound);
  return d;
}

LatticeBasis generate_lattice(const LatticeGeneratorSpec& spec, std::uint64_t seed) {
  const std::size_t n = spec.n;
  if (n < 1) throw DomainError("lattice generators need n >= 1");
  switch (spec.kind) {
    case GeneratorKind::Identity: return LatticeBasis::identity(n);
    case GeneratorKind::Checkerboard: {
      std::vector<std::vector<long long>> rows(n, std::vector<long long>(n, 0));
      rows[0][0] = 2;
      for (std::size_t i = 1; i < n; ++i) rows[i][0] = rows[i][i] = 1;
      return LatticeBasis::from_integers(rows);
    }
    case GeneratorKind::RandomInteger: {
      if (spec.bound < 1) throw DomainError("random-integer needs bound >= 1");
      Rng rng(seed, 0);
      for (;;) {
        std::vector<std::vector<long long>> rows(n, std::vector<long long>(n));
        for (auto& r : rows)
          for (auto& x : r) x = uniform_in(rng, -spec.bound, spec.bound);
        try {
          return LatticeBasis::from_integers(rows);
        } catch (const RankDeficientError&) {
        }
      }
    }
    case GeneratorKind::RandomDualOrthogonal: {
      const auto d = dual_orthogonal_scales(spec, seed);
      Rng srng(seed, 1);
      RationalMatrix skew(n, RationalVector(n, Rational(0)));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          skew[i][j] = uniform_in(srng, -1, 1);
          skew[j][i] = -skew[i][j];
        }
      RationalMatrix rows = cayley_orthogonal(skew);
      for (std::size_t i = 0; i < n; ++i) rows[i] = scaled(rows[i], Rational(d[i]));
      // 2n random elementary row additions keep the lattice and hide the orthogonal basis
      Rng urng(seed, 2);
      for (std::size_t step = 0; n > 1 && step < 2 * n; ++step) {
        const std::size_t i = urng.below(n);
        std::size_t j = urng.below(n - 1);
        if (j >= i) ++j;
        axpy(rows[i], urng.below(2) ? Rational(1) : Rational(-1), rows[j]);
      }
      return LatticeBasis(std::move(rows), n);
    }
  }
  throw DomainError("unknown lattice generator");
}

}  // namespace latgauss
