#pragma once

#include "latgauss/decoder.hpp"

#include <functional>

namespace latgauss {

// An inner CVP solver bound to one lattice. solve() returns coefficients over
// the prepared basis, or nothing on failure. Rank-0 lattices never reach it.
class PreparedInner {
 public:
  virtual ~PreparedInner() = default;
  virtual std::optional<Coefficients> solve(const RationalVector& target) const = 0;
};

class InnerSolver {
 public:
  virtual ~InnerSolver() = default;
  virtual std::shared_ptr<const PreparedInner> prepare(const LatticeBasis& basis) const = 0;
  virtual std::string name() const = 0;
};

// Exact closest vector by enumeration.
class ExactInner : public InnerSolver {
 public:
  std::shared_ptr<const PreparedInner> prepare(const LatticeBasis& basis) const override;
  std::string name() const override { return "oracle"; }
};

// Worst admissible CVP_gamma^phi oracle with phi = alpha * lambda_1: inside the
// promise (dist <= phi) it returns the farthest point within gamma * dist,
// outside it returns a far lattice point (closest + 7 b_1).
class PromiseAdversaryInner : public InnerSolver {
 public:
  PromiseAdversaryInner(Real alpha, Real gamma) : alpha_(alpha), gamma_(gamma) {}
  std::shared_ptr<const PreparedInner> prepare(const LatticeBasis& basis) const override;
  std::string name() const override { return "adversary"; }

 private:
  Real alpha_, gamma_;
};

// The gradient-ascent decoder with N = ceil(c k log(1/eps) / sqrt(eps)) at rank k.
class BddInner : public InnerSolver {
 public:
  BddInner(Real eps, Real c, std::uint64_t seed) : eps_(eps), c_(c), seed_(seed) {}
  std::shared_ptr<const PreparedInner> prepare(const LatticeBasis& basis) const override;
  std::string name() const override { return "bdd"; }
  std::size_t advice_size(std::size_t rank) const;

 private:
  Real eps_, c_;
  std::uint64_t seed_;
};

struct Candidate {
  std::size_t level;  // i for the Kannan scheme, k for the master scheme
  bool ok = false;
  RationalVector vector;
  Coefficients coefficients;  // over the reduction's working basis
  Rational dist2;
  Rational projected2;  // |pi(y - t)|^2
  Rational babai2;      // |z - pi_span(t - y)|^2
};

struct ReductionResult {
  RationalVector vector;
  Coefficients coefficients;  // over `basis`
  LatticeBasis basis;         // HKZ (or g-HKZ) basis the candidates live on
  Rational dist2;
  std::vector<Candidate> candidates;
  std::size_t chosen = 0;
  bool found = false;
};

// gamma'(n) = max_i sqrt(gamma(n-i)^2 + i/(4 alpha^2)) with gamma(0) = 0.
Real kannan_gamma_prime(std::size_t n, Real alpha, const std::function<Real(std::size_t)>& gamma);

struct KannanAdvice {
  LatticeBasis hkz;
  std::vector<ProjectedLattice> levels;  // N_i = pi_i(L), i = 0..n
  std::vector<std::shared_ptr<const PreparedInner>> per_level;
};
KannanAdvice kannan_preprocess(const LatticeBasis& basis, const InnerSolver& inner);
ReductionResult kannan_reduce(const KannanAdvice& advice, const RationalVector& target);
ReductionResult kannan_reduce(const LatticeBasis& basis, const RationalVector& target, const InnerSolver& inner);

// n = i_0 > i_1 > ... > i_l = 0, i_{k+1} the largest i < i_k with
// max_{j<=i} |b~_j| < max_{j<=i_k} |b~_j| / c.
std::vector<std::size_t> master_indices(const LatticeBasis& basis, Real c);

struct MasterAdvice {
  LatticeBasis hkz;
  std::vector<std::size_t> indices;
  std::size_t r = 1;
  Real c = 1;
  std::vector<LatticeBasis> blocks;  // L_k over pi_k(b_{i_k+1}), ..., pi_k(b_{i_max(k-r,0)})
  std::vector<std::shared_ptr<const PreparedInner>> per_block;
  std::vector<ProjectedLattice> projections;  // pi_k(L) for each k
  std::size_t total_dimension() const;
};
MasterAdvice master_preprocess(const LatticeBasis& basis, Real g, std::size_t h, const InnerSolver& inner);
ReductionResult master_reduce(const MasterAdvice& advice, const RationalVector& target);
Real master_gamma_prime(std::size_t n, Real g, Real alpha);

// g-HKZ basis built by the SVP -> CVP^phi reduction through `inner`.
LatticeBasis g_hkz_basis(const LatticeBasis& basis, const InnerSolver& inner);
ReductionResult cvp_promise_reduce(const LatticeBasis& basis, const RationalVector& target,
                                   const InnerSolver& inner);

// Primes and residues for the sparsification coset machinery.
bool is_prime(std::uint64_t n);
std::uint64_t next_prime(std::uint64_t n);  // smallest prime >= n
std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t p);

// L_{p,c}(B, z) = { y in L : <z, B^{-1} y> = c mod p }.
struct SparseCoset {
  LatticeBasis basis;
  std::uint64_t p = 2;
  std::vector<std::uint64_t> z;
  std::uint64_t c = 0;

  std::uint64_t residue(const Coefficients& a) const;
  bool contains(const RationalVector& y) const;
  Coefficients coset_point() const;  // one element of L_{p,c}, as coefficients over basis
  LatticeBasis sublattice() const;   // basis of L_{p,0}
};
SparseCoset sparse_coset_sample(const LatticeBasis& basis, std::uint64_t p, std::uint64_t seed);

struct SparsifyOptions {
  enum class Mode { Paper, Oracle };
  Mode mode = Mode::Oracle;
  std::size_t trials = 100;       // per prime in paper mode
  std::size_t prime_budget = 40;  // paper mode: primes just above 2^i, i = 1..budget
};
struct SparsifyResult {
  RationalVector vector;
  Rational dist2;
  bool found = false;
  std::size_t trials_run = 0;
  std::size_t inner_failures = 0;
  std::vector<std::uint64_t> primes;
};
// One sparsification trial on an integral basis: sample L_{p,c}(B, z) from the
// seed and ask the inner solver for the closest point of that coset.
std::optional<RationalVector> sparsify_trial(const LatticeBasis& integral_basis, const RationalVector& target,
                                             std::uint64_t p, std::uint64_t trial_seed, const InnerSolver& inner);
// LCM of all entry denominators; scaling by it makes the basis integral.
Integer denominator_lcm(const LatticeBasis& basis);

// The number of lattice points with |y|^2 <= radius2.
std::uint64_t ball_count(const LatticeBasis& basis, const Rational& radius2);
SparsifyResult sparsify_reduce(const LatticeBasis& basis, const RationalVector& target, Real tau,
                               const InnerSolver& inner, std::uint64_t seed, const SparsifyOptions& opts = {});

}  // namespace latgauss
