#pragma once

#include "latgauss/rational.hpp"

#include <memory>
#include <optional>
#include <string>

namespace latgauss {

struct GramSchmidtData {
  RationalMatrix orthogonal;  // b~_i
  RationalMatrix mu;          // mu[i][j] for j < i, mu[i][i] = 1, zero above
  RationalVector norm2;       // |b~_i|^2, all > 0
};

class LatticeBasis;

// LLL-reduced view of a lattice. reduced.row(i) = sum_j transform[i][j] * original.row(j).
struct ReducedForm {
  std::shared_ptr<const LatticeBasis> basis;
  std::vector<Coefficients> transform;
};

// Immutable; the rows are the basis vectors b_1..b_n in Q^m.
class LatticeBasis {
 public:
  LatticeBasis();  // rank 0 in ambient dimension 0
  explicit LatticeBasis(RationalMatrix rows);
  LatticeBasis(RationalMatrix rows, std::size_t ambient_dim);  // rows may be empty

  static LatticeBasis from_integers(const std::vector<std::vector<long long>>& rows);
  static LatticeBasis identity(std::size_t n);

  std::size_t rank() const { return rows_.size(); }
  std::size_t ambient_dim() const { return m_; }
  const RationalMatrix& vectors() const { return rows_; }
  const RationalVector& row(std::size_t i) const { return rows_[i]; }

  const GramSchmidtData& gram_schmidt() const;
  // Dual basis inside span(L), computed once.
  const LatticeBasis& dual() const;
  const ReducedForm& reduced() const;

  // Float mirrors of exact data.
  const RealMat& real_rows() const;        // n x m
  const RealVec& real_gs_norm2() const;    // |b~_i|^2
  const RealMat& real_mu() const;          // n x n
  const RealMat& real_gs_rows() const;     // b~_i as rows

  RationalVector combine(const Coefficients& c) const;
  RealVec combine_real(const Coefficients& c) const;
  // The coordinates <b*_i, v>; integral exactly when v is a member (for v in span).
  RationalVector span_coordinates(const RationalVector& v) const;
  RationalVector project_to_span(const RationalVector& v) const;
  RealVec project_to_span(const RealVec& v) const;
  std::optional<Coefficients> coefficients(const RationalVector& v) const;
  bool contains(const RationalVector& v) const { return coefficients(v).has_value(); }

  // Sub-basis of rows [begin, end).
  LatticeBasis slice(std::size_t begin, std::size_t end) const;
  LatticeBasis scaled_by(const Rational& c) const;
  // Orthogonal projection pi_i onto span(b_1..b_i)^perp.
  RationalVector project_out_prefix(const RationalVector& v, std::size_t i) const;

  Rational det2() const;  // Gram determinant = prod |b~_i|^2

  bool operator==(const LatticeBasis& o) const { return m_ == o.m_ && rows_ == o.rows_; }

 private:
  struct Cache;
  RationalMatrix rows_;
  std::size_t m_ = 0;
  std::shared_ptr<Cache> cache_;
};

GramSchmidtData gram_schmidt(const LatticeBasis& basis);
LatticeBasis dual_basis(const LatticeBasis& basis);

// Row-echelon comparison: same lattice iff every row of one is an integer
// combination of the other (and ranks agree).
bool same_lattice(const LatticeBasis& a, const LatticeBasis& b);

struct BabaiResult {
  RationalVector vector;
  Coefficients coefficients;
};
BabaiResult babai_nearest_plane_full(const LatticeBasis& basis, const RationalVector& target);
RationalVector babai_nearest_plane(const LatticeBasis& basis, const RationalVector& target);

// Exact float-free LLL; used as preconditioning for enumeration.
ReducedForm lll_reduce(const LatticeBasis& basis, const Rational& delta = Rational(99, 100));

// Size-reduce rows in place so all |mu_ij| <= 1/2; lattice unchanged.
LatticeBasis size_reduce(const LatticeBasis& basis);

struct ProjectedLattice {
  LatticeBasis base;
  std::size_t drop_count = 0;
  LatticeBasis projected_basis;  // pi_i(b_{i+1}), ..., pi_i(b_n)

  // Projected coefficients -> coefficients over the full basis, zero on the first i.
  Coefficients lift_coefficients(const Coefficients& c) const;
  RationalVector lift(const Coefficients& c) const;
  RationalVector project(const RationalVector& v) const;
};

ProjectedLattice project_lattice(const LatticeBasis& basis, std::size_t drop_count);

// Plain text: "n m" then n rows of m rationals.
LatticeBasis read_lattice(std::istream& in);
LatticeBasis read_lattice_file(const std::string& path);
void write_lattice(std::ostream& out, const LatticeBasis& basis);
void write_lattice_file(const std::string& path, const LatticeBasis& basis);

}  // namespace latgauss
