#pragma once

#include "latgauss/lattice.hpp"

#include <cmath>

namespace latgauss {

// Node budget: LATGAUSS_BUDGET if set, else 10^7.
std::uint64_t default_enumeration_budget();

// Depth-first ball enumeration on the LLL-reduced form of a basis.
// Points are reported by their coefficients over the reduced basis.
class Enumerator {
 public:
  explicit Enumerator(const LatticeBasis& basis, std::uint64_t budget = default_enumeration_budget());

  // Calls visit(const std::int64_t* reduced_coeffs, Real dist2, Real& radius2) for every
  // y in L with |P(y - center)|^2 <= radius2, where P projects onto span(L). The test is
  // in floats with a relative slack of 1e-9, so callers needing exactness re-check.
  // visit may shrink radius2. Returns the number of accepted points.
  template <class F>
  std::uint64_t run(const RealVec& center, Real radius2, F&& visit);

  Coefficients original_coefficients(const std::int64_t* red) const;
  RealVec point(const std::int64_t* red) const;
  std::size_t rank() const { return n_; }
  std::uint64_t nodes() const { return nodes_; }
  const LatticeBasis& reduced_basis() const { return *red_->basis; }

 private:
  template <class F>
  void descend(std::size_t k, Real partial, Real& radius2, F& visit);
  static Real slacked(Real r2) { return r2 + r2 * 1e-9L + 1e-24L; }

  LatticeBasis basis_;  // shares the cache, keeps red_ alive
  const ReducedForm* red_;
  std::size_t n_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::uint64_t accepted_ = 0;
  RealMat mu_;
  RealVec bn_;
  RealVec gamma_;
  std::vector<std::int64_t> x_;
};

template <class F>
std::uint64_t Enumerator::run(const RealVec& center, Real radius2, F&& visit) {
  accepted_ = 0;
  nodes_ = 0;
  x_.assign(n_, 0);
  if (radius2 < 0) return 0;
  const RealMat& gsr = red_->basis->real_gs_rows();
  gamma_.resize(static_cast<Eigen::Index>(n_));
  for (std::size_t k = 0; k < n_; ++k) {
    const auto ek = static_cast<Eigen::Index>(k);
    gamma_(ek) = gsr.row(ek).dot(center) / bn_(ek);
  }
  if (n_ == 0) {
    ++accepted_;
    visit(x_.data(), Real(0), radius2);
    return accepted_;
  }
  descend(n_ - 1, Real(0), radius2, visit);
  return accepted_;
}

template <class F>
void Enumerator::descend(std::size_t k, Real partial, Real& radius2, F& visit) {
  const auto ek = static_cast<Eigen::Index>(k);
  Real cent = gamma_(ek);
  for (std::size_t j = k + 1; j < n_; ++j) cent -= mu_(static_cast<Eigen::Index>(j), ek) * static_cast<Real>(x_[j]);
  const Real bk = bn_(ek);
  const auto start = static_cast<std::int64_t>(std::llround(cent));
  // Upward from the nearest integer, then downward.
  for (int dir = 0; dir < 2; ++dir) {
    for (std::int64_t x = dir == 0 ? start : start - 1;; x += dir == 0 ? 1 : -1) {
      if (++nodes_ > budget_)
        throw BudgetExceededError("enumeration node budget exceeded", accepted_);
      const Real d = (static_cast<Real>(x) - cent);
      const Real p = partial + d * d * bk;
      if (p > slacked(radius2)) break;
      x_[k] = x;
      if (k == 0) {
        ++accepted_;
        visit(static_cast<const std::int64_t*>(x_.data()), p, radius2);
      } else {
        descend(k - 1, p, radius2, visit);
      }
    }
  }
  x_[k] = 0;
}

// Exactly {y in L : |y - center| <= radius}, as exact vectors.
std::vector<RationalVector> enumerate_points(const LatticeBasis& basis, const RationalVector& center,
                                             Real radius);
std::vector<Coefficients> enumerate_coefficients(const LatticeBasis& basis, const RationalVector& center,
                                                 const Rational& radius2);

struct LatticePoint {
  RationalVector vector;
  Coefficients coefficients;  // over the input basis
  Rational norm2;             // squared distance to the query point
};

// Ties: lexicographically smallest coefficient vector over the input basis.
LatticePoint shortest_vector_full(const LatticeBasis& basis);
RationalVector shortest_vector(const LatticeBasis& basis);
Rational lambda1_squared(const LatticeBasis& basis);

LatticePoint cvp_oracle_full(const LatticeBasis& basis, const RationalVector& target);
RationalVector cvp_oracle(const LatticeBasis& basis, const RationalVector& target);
Rational dist2_to_lattice(const LatticeBasis& basis, const RationalVector& target);

// New basis of the same lattice whose first row is sum_i c_i b_i; c must be primitive.
LatticeBasis complete_to_basis(const LatticeBasis& basis, const Coefficients& primitive);
Coefficients make_primitive(Coefficients c);

// g = 1: HKZ. g > 1: each first vector is allowed up to g * lambda_1 of its projection.
LatticeBasis hkz_basis(const LatticeBasis& basis, Real relax = 1);

// Exact checks of the three HKZ conditions (or their g-relaxation).
bool is_hkz(const LatticeBasis& basis, Real relax = 1);

}  // namespace latgauss
