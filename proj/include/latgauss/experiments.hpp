#pragma once

#include "latgauss/config.hpp"
#include "latgauss/reductions.hpp"
#include "latgauss/rng.hpp"

#include <functional>

namespace latgauss {

struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string csv;  // header line, then one row per record
  std::size_t rows = 0;
  std::vector<Verdict> verdicts;
  bool passed() const;
};

// Columns, after the leading config_hash,seed pair:
//   decode-success     trial,offset_norm,radius,status,iterations,final_norm,matches_oracle
//   estimator-error    N,value_q99,gradient_q99
//   contraction        fixture,trial,t_norm,residual,quarter_bound,certified_error,ok
//   reduction-audit    trial,dist,output_dist,factor,bound,total_dim,ok
//   sparsify-audit     section,index,hit,stat   (section lemma | trial | run | full)
//   local-maxima       n,f,f_closed_form,grad_norm,grad_certified,max_eigenvalue,hessian_certified
//                      (output = slice: n,x,y,f,f_certified)
//   smoothing-profile  n,fixture,eps,dual_eta,lambda1,radius,chain_1,chain_2,ok
// Throws ConfigError on unknown keys or malformed values.
ExperimentReport run_experiment(const ExperimentConfig& config);

// body(i) for i in [0, count) over a shared work queue; threads <= 1 runs inline.
// Outputs must be written to per-index slots so results are schedule-independent.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

// Uniform point in the ball of the given radius (n-dimensional).
RealVec uniform_in_ball(Rng& rng, std::size_t n, Real radius);

// The 0.99-quantile as the ceil(0.99 m)-th order statistic.
Real quantile99(std::vector<Real> xs);

// Closed form of f(e1) on the checkerboard lattice.
Real checkerboard_f_e1(std::size_t n);

}  // namespace latgauss
