#include "latgauss/enumeration.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace latgauss {

std::uint64_t default_enumeration_budget() {
  if (const char* env = std::getenv("LATGAUSS_BUDGET")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v >= 1) return static_cast<std::uint64_t>(v);
  }
  return 10'000'000ULL;
}

Enumerator::Enumerator(const LatticeBasis& basis, std::uint64_t budget)
    : basis_(basis), red_(&basis_.reduced()), n_(basis.rank()), budget_(budget) {
  mu_ = red_->basis->real_mu();
  bn_ = red_->basis->real_gs_norm2();
}

Coefficients Enumerator::original_coefficients(const std::int64_t* red) const {
  Coefficients out(n_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (red[i] == 0) continue;
    for (std::size_t j = 0; j < n_; ++j)
      out[j] = checked_add(out[j], checked_mul(red[i], red_->transform[i][j]));
  }
  return out;
}

RealVec Enumerator::point(const std::int64_t* red) const {
  const RealMat& rows = red_->basis->real_rows();
  RealVec v = RealVec::Zero(rows.cols());
  for (std::size_t i = 0; i < n_; ++i)
    if (red[i] != 0) v += static_cast<Real>(red[i]) * rows.row(static_cast<Eigen::Index>(i)).transpose();
  return v;
}

namespace {

bool lex_less(const Coefficients& a, const Coefficients& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::vector<Coefficients> enumerate_coefficients(const LatticeBasis& basis, const RationalVector& center,
                                                 const Rational& radius2) {
  if (radius2 < 0) throw DomainError("radius must be non-negative");
  const RationalVector cproj = basis.project_to_span(center);
  const Rational perp2 = norm2(sub(center, cproj));
  std::vector<Coefficients> out;
  if (perp2 > radius2) return out;
  const Rational in_span = radius2 - perp2;
  Enumerator e(basis);
  e.run(to_real(cproj), to_real(in_span) * (1 + 1e-12L), [&](const std::int64_t* red, Real, Real&) {
    Coefficients c = e.original_coefficients(red);
    if (norm2(sub(basis.combine(c), cproj)) <= in_span) out.push_back(std::move(c));
  });
  return out;
}

std::vector<RationalVector> enumerate_points(const LatticeBasis& basis, const RationalVector& center,
                                             Real radius) {
  if (!(radius >= 0)) throw DomainError("radius must be non-negative");
  const Rational r = to_rational(radius);
  std::vector<RationalVector> out;
  for (const auto& c : enumerate_coefficients(basis, center, r * r)) out.push_back(basis.combine(c));
  return out;
}

LatticePoint shortest_vector_full(const LatticeBasis& basis) {
  if (basis.rank() == 0) throw DomainError("rank-0 lattice has no nonzero vector");
  const LatticeBasis& red = *basis.reduced().basis;
  Rational start = norm2(red.row(0));
  for (std::size_t i = 1; i < red.rank(); ++i) start = std::min(start, norm2(red.row(i)));
  Enumerator e(basis);
  LatticePoint best;
  bool have = false;
  const RealVec zero = RealVec::Zero(static_cast<Eigen::Index>(basis.ambient_dim()));
  e.run(zero, to_real(start) * (1 + 1e-12L), [&](const std::int64_t* red_c, Real, Real& radius2) {
    if (std::all_of(red_c, red_c + e.rank(), [](std::int64_t v) { return v == 0; })) return;
    Coefficients c = e.original_coefficients(red_c);
    RationalVector v = basis.combine(c);
    Rational n2 = norm2(v);
    if (!have || n2 < best.norm2 || (n2 == best.norm2 && lex_less(c, best.coefficients))) {
      best = {std::move(v), std::move(c), n2};
      have = true;
      radius2 = to_real(best.norm2) * (1 + 1e-12L);
    }
  });
  if (!have) throw LatticeError("shortest vector search found no candidate");
  return best;
}

RationalVector shortest_vector(const LatticeBasis& basis) { return shortest_vector_full(basis).vector; }

Rational lambda1_squared(const LatticeBasis& basis) { return shortest_vector_full(basis).norm2; }

LatticePoint cvp_oracle_full(const LatticeBasis& basis, const RationalVector& target) {
  if (target.size() != basis.ambient_dim()) throw DomainError("target dimension mismatch");
  const RationalVector cproj = basis.project_to_span(target);
  const Rational perp2 = norm2(sub(target, cproj));
  if (basis.rank() == 0) return {zero_vector(basis.ambient_dim()), {}, perp2};
  const LatticeBasis& red = *basis.reduced().basis;
  const RationalVector start_v = babai_nearest_plane(red, cproj);
  LatticePoint best{start_v, *basis.coefficients(start_v), norm2(sub(start_v, cproj))};
  Enumerator e(basis);
  e.run(to_real(cproj), to_real(best.norm2) * (1 + 1e-12L) + 1e-30L,
        [&](const std::int64_t* red_c, Real, Real& radius2) {
          Coefficients c = e.original_coefficients(red_c);
          RationalVector v = basis.combine(c);
          Rational d2 = norm2(sub(v, cproj));
          if (d2 < best.norm2 || (d2 == best.norm2 && lex_less(c, best.coefficients))) {
            best = {std::move(v), std::move(c), d2};
            radius2 = to_real(best.norm2) * (1 + 1e-12L) + 1e-30L;
          }
        });
  best.norm2 += perp2;
  return best;
}

RationalVector cvp_oracle(const LatticeBasis& basis, const RationalVector& target) {
  return cvp_oracle_full(basis, target).vector;
}

Rational dist2_to_lattice(const LatticeBasis& basis, const RationalVector& target) {
  return cvp_oracle_full(basis, target).norm2;
}

namespace {

// g = p a + q b with g = gcd(a, b) > 0.
void extended_gcd(const Integer& a, const Integer& b, Integer& g, Integer& p, Integer& q) {
  Integer old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Integer quo = old_r / r;
    Integer tmp = old_r - quo * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quo * s;
    old_s = s;
    s = tmp;
    tmp = old_t - quo * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  g = old_r;
  p = old_s;
  q = old_t;
}

}  // namespace

Coefficients make_primitive(Coefficients c) {
  std::int64_t g = 0;
  for (auto v : c) g = std::gcd(g, v < 0 ? -v : v);
  if (g > 1)
    for (auto& v : c) v /= g;
  return c;
}

LatticeBasis complete_to_basis(const LatticeBasis& basis, const Coefficients& primitive) {
  const std::size_t n = basis.rank();
  if (primitive.size() != n || n == 0) throw DomainError("coefficient vector has wrong length");
  RationalMatrix rows = basis.vectors();
  std::vector<Integer> x(primitive.begin(), primitive.end());
  for (std::size_t i = n - 1; i >= 1; --i) {
    if (x[i] == 0) continue;
    if (x[i - 1] == 0) {
      std::swap(rows[i - 1], rows[i]);
      std::swap(x[i - 1], x[i]);
      continue;
    }
    Integer g, p, q;
    extended_gcd(x[i - 1], x[i], g, p, q);
    const Integer a = x[i - 1] / g, b = x[i] / g;
    RationalVector r0 = scaled(rows[i - 1], Rational(a));
    axpy(r0, Rational(b), rows[i]);
    RationalVector r1 = scaled(rows[i - 1], Rational(-q));
    axpy(r1, Rational(p), rows[i]);
    rows[i - 1] = std::move(r0);
    rows[i] = std::move(r1);
    x[i - 1] = g;
    x[i] = 0;
  }
  if (x[0] == -1) {
    for (auto& v : rows[0]) v = -v;
  } else if (x[0] != 1) {
    throw DomainError("coefficient vector is not primitive");
  }
  return LatticeBasis(std::move(rows), basis.ambient_dim());
}

namespace {

LatticeBasis hkz_rec(const LatticeBasis& b, const Rational& relax2) {
  const std::size_t n = b.rank();
  if (n == 0) return b;
  const LatticePoint sv = shortest_vector_full(b);
  Coefficients pick = sv.coefficients;
  if (norm2(b.row(0)) <= relax2 * sv.norm2) {
    // An admissible first vector is kept, so HKZ inputs are fixed points.
    pick.assign(n, 0);
    pick[0] = 1;
  } else if (relax2 > 1) {
    const ReducedForm& red = b.reduced();
    for (std::size_t i = 0; i < n; ++i) {
      if (norm2(red.basis->row(i)) <= relax2 * sv.norm2) {
        pick = red.transform[i];
        break;
      }
    }
  }
  const LatticeBasis c = complete_to_basis(b, pick);
  if (n == 1) return c;
  const ProjectedLattice proj = project_lattice(c, 1);
  const LatticeBasis h = hkz_rec(proj.projected_basis, relax2);
  RationalMatrix rows{c.row(0)};
  const Rational b1n = norm2(c.row(0));
  for (const auto& hr : h.vectors()) {
    auto co = proj.projected_basis.coefficients(hr);
    if (!co) throw LatticeError("projected HKZ row left the projected lattice");
    RationalVector lifted = proj.lift(*co);
    const Rational q(round_rational(dot(lifted, c.row(0)) / b1n));
    axpy(lifted, -q, c.row(0));
    rows.push_back(std::move(lifted));
  }
  return LatticeBasis(std::move(rows), b.ambient_dim());
}

}  // namespace

LatticeBasis hkz_basis(const LatticeBasis& basis, Real relax) {
  if (!(relax >= 1)) throw DomainError("HKZ relaxation must be >= 1");
  const Rational g = to_rational(relax);
  return hkz_rec(basis, g * g);
}

bool is_hkz(const LatticeBasis& basis, Real relax) {
  const Rational g = to_rational(relax);
  const auto& gs = basis.gram_schmidt();
  for (std::size_t i = 0; i < basis.rank(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (abs(gs.mu[i][j]) > Rational(1, 2)) return false;
  for (std::size_t i = 0; i < basis.rank(); ++i) {
    const LatticeBasis p = project_lattice(basis, i).projected_basis;
    const Rational l2 = lambda1_squared(p);
    if (gs.norm2[i] > g * g * l2) return false;
  }
  return true;
}

}  // namespace latgauss
