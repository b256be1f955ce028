#pragma once

#include "latgauss/enumeration.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace testutil {

using namespace latgauss;

inline LatticeBasis random_integer_basis(std::size_t n, std::mt19937_64& rng, int bound = 10) {
  std::uniform_int_distribution<int> d(-bound, bound);
  for (;;) {
    std::vector<std::vector<long long>> rows(n, std::vector<long long>(n));
    for (auto& r : rows)
      for (auto& x : r) x = d(rng);
    try {
      return LatticeBasis::from_integers(rows);
    } catch (const RankDeficientError&) {
    }
  }
}

inline RationalVector random_target(std::size_t m, std::mt19937_64& rng, int range = 10, int den = 64) {
  std::uniform_int_distribution<int> d(-range * den, range * den);
  RationalVector t(m);
  for (auto& x : t) x = Rational(d(rng), den);
  return t;
}

// Independent oracle: scan the coefficient box |x_i - <b*_i, c>| <= |b*_i| r.
inline void box_scan(const LatticeBasis& b, const RationalVector& c, Real r,
                     const std::function<void(const Coefficients&, const RationalVector&)>& f) {
  const std::size_t n = b.rank();
  const LatticeBasis& d = b.dual();
  std::vector<std::int64_t> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Real mid = to_real(dot(d.row(i), c));
    const Real w = std::sqrt(to_real(norm2(d.row(i)))) * r + 1e-9L;
    lo[i] = static_cast<std::int64_t>(std::ceil(mid - w));
    hi[i] = static_cast<std::int64_t>(std::floor(mid + w));
  }
  Coefficients x(lo);
  if (n == 0) {
    f(x, zero_vector(b.ambient_dim()));
    return;
  }
  for (;;) {
    f(x, b.combine(x));
    std::size_t i = 0;
    while (i < n && x[i] == hi[i]) {
      x[i] = lo[i];
      ++i;
    }
    if (i == n) break;
    ++x[i];
  }
}

}  // namespace testutil
