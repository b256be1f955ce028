#pragma once

#include "latgauss/experiments.hpp"

namespace latgauss {

// Upper bound on f(t) for rho(L) = 1 + eps, as a function of |t|:
// rho(t)(1/(1+eps) + eps/(1+eps) cosh(2 pi s|t|)) + 2 pi |t| int_{s-|t|}^{s+|t|} e^{-pi z^2} dz.
Real periodic_f_upper_bound(Real t_norm, Real eps);

// |periodic_f - periodic_f_dual| <= sum of both certified bounds, each evaluated
// at tol, on `pairs` random (rank <= 4 lattice, target) pairs.
Verdict poisson_consistency(std::size_t pairs, std::uint64_t seed, Real tol = 1e-8L, std::size_t threads = 1);

// On normalized Z^4 and a random rank-4 fixture: f(t) >= rho(t) - 2 tol and
// f(t) <= periodic_f_upper_bound within the certified error, |t| <= s_eps.
std::vector<Verdict> gaussian_sandwich(const std::vector<Real>& eps_values, std::size_t targets, std::uint64_t seed,
                                       Real tol = 1e-12L, std::size_t threads = 1);

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::string advice_path;  // when set, its frame identity is checked as its own verdict
  std::size_t threads = 1;
};

// Every module invariant at desk scale; failures come back as verdicts.
std::vector<Verdict> verify_suite(const VerifyOptions& opts = {});

}  // namespace latgauss
