#pragma once

#include "latgauss/enumeration.hpp"

#include <string>

namespace latgauss {

// A truncated rho-sum: the true quantity lies within +-truncation_bound of value
// (Euclidean norm for vectors, spectral norm for matrices).
template <class T>
struct GaussianEvaluation {
  T value{};
  Real truncation_bound = 0;
  Real truncation_radius = 0;
};
using ScalarEvaluation = GaussianEvaluation<Real>;
using VectorEvaluation = GaussianEvaluation<RealVec>;
using MatrixEvaluation = GaussianEvaluation<RealMat>;

// For a rank-n lattice L, any shift c and k in {0,1,2}:
//   sum_{x in L+c, |x|>R} |x|^k rho(x) <= tail_factor(n,k,R) * rho(L).
Real tail_factor(std::size_t n, int k, Real radius);
// Smallest R (to ~1e-12 relative) with tail_factor(n,k,R) <= target.
Real tail_radius(std::size_t n, int k, Real target);

ScalarEvaluation rho_shifted(const LatticeBasis& basis, const RealVec& shift, Real s, Real tol);
ScalarEvaluation periodic_f(const LatticeBasis& basis, const RealVec& t, Real tol);
ScalarEvaluation periodic_f_dual(const LatticeBasis& basis, const RealVec& t, Real tol);

struct Derivatives {
  ScalarEvaluation value;
  VectorEvaluation gradient;
  MatrixEvaluation hessian;
};
// Dual-side sums: grad f = -2 pi E[w sin], Hf = -4 pi^2 E[w w^T cos], w ~ D_{L*}.
Derivatives derivatives_f(const LatticeBasis& basis, const RealVec& t, Real tol);
// Primal-side sums over L + t; cheap when L is sparse (e.g. rho(L) = 1 + eps).
Derivatives derivatives_f_primal(const LatticeBasis& basis, const RealVec& t, Real tol);

struct SmoothingResult {
  Real eta = 0;
  Real eps = 0;
  Real lo = 0, hi = 0;  // final bisection bracket
  Real residual = 0;    // certified |rho_{1/eta}(L* \ 0) - eps|
  Real sandwich_lo = 0, sandwich_hi = 0;  // starting bracket from lambda_1(L*)
  Real dual_lambda1 = 0;
};
// eta_eps(L): the s with rho_{1/s}(L* \ {0}) = eps. tol <= 0 selects 1e-6 * eps.
SmoothingResult smoothing_parameter(const LatticeBasis& basis, Real eps, Real tol = 0);

// Bounds on eta_eps(L) in terms of lambda_1(L*).
Real smoothing_lower_bound(Real dual_lambda1, Real eps);
Real smoothing_upper_bound(Real dual_lambda1, std::size_t n, Real eps);

struct SEpsDelta {
  Real s_eps;
  Real delta_max;
};
// Requires 0 < eps < 1/200.
SEpsDelta s_eps_delta_max(Real eps);
// The closed form without the range check.
Real s_eps_formula(Real eps);

struct DgsSampleSet {
  LatticeBasis basis;
  std::vector<Coefficients> coefficients;  // over basis
  Real parameter_s = 0;
  Real mass_covered = 0;
  std::uint64_t seed = 0;
  std::string method;  // "table" or "klein-rejection"

  std::size_t size() const { return coefficients.size(); }
  RationalVector vector(std::size_t i) const { return basis.combine(coefficients[i]); }
  RealVec real_vector(std::size_t i) const { return basis.combine_real(coefficients[i]); }
};

struct SamplerOptions {
  enum class Method { Auto, Table, KleinRejection };
  Method method = Method::Auto;
  std::size_t table_limit = std::size_t(1) << 18;  // estimated ball size for the table path
};

// Sample i uses the RNG stream (seed, i), so any prefix is reproducible on its own.
DgsSampleSet sample_discrete_gaussian(const LatticeBasis& basis, Real s, std::size_t count,
                                      std::uint64_t seed, const SamplerOptions& opts = {});

}  // namespace latgauss
