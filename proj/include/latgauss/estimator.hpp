#pragma once

#include "latgauss/gaussian.hpp"

#include <iosfwd>

namespace latgauss {

class DenominatorTooSmallError : public LatticeError {
 public:
  DenominatorTooSmallError(Real value, Real floor);
  Real value() const { return value_; }
  Real floor() const { return floor_; }

 private:
  Real value_, floor_;
};

// Dual vectors w_i in L*, stored exactly as coefficients over `dual` and as
// floats in units of 1/scale: row i of coords is w_i / scale. Evaluations take
// targets in the scaled frame, i.e. they see the dual of scale * L.
struct AdviceW {
  LatticeBasis dual;
  std::vector<Coefficients> coefficients;
  RealMat coords;  // N x ambient
  Real eps = 0;
  Real source_scale = 1;
  std::uint64_t seed = 0;

  std::size_t N() const { return coefficients.size(); }
  std::size_t ambient_dim() const { return static_cast<std::size_t>(coords.cols()); }
  RationalVector exact(std::size_t i) const { return dual.combine(coefficients[i]); }
  RealVec row(std::size_t i) const { return coords.row(static_cast<Eigen::Index>(i)).transpose(); }
};

AdviceW make_advice(LatticeBasis dual, std::vector<Coefficients> coefficients, Real eps,
                    std::uint64_t seed, Real scale);

// N i.i.d. samples from D_{L*, eta} with eta = eta_eps(L*) unless given (> 0).
AdviceW generate_advice(const LatticeBasis& basis, Real eps, std::size_t N, std::uint64_t seed,
                        Real scale = 1, Real eta = 0, const SamplerOptions& opts = {});

Real f_W(const AdviceW& a, const RealVec& t);
RealVec grad_f_W(const AdviceW& a, const RealVec& t);
RealMat hessian_f_W(const AdviceW& a, const RealVec& t);

struct EstimatorPoint {
  Real value;
  RealVec gradient;
};
// One pass over W for both f_W and its gradient.
EstimatorPoint evaluate_f_W(const AdviceW& a, const RealVec& t);

inline Real default_denominator_floor(Real eps) { return std::pow(eps, Real(0.25)) / 4; }

// t + grad f_W(t) / (2 pi f_W(t)); throws DenominatorTooSmallError if
// |f_W(t)| < floor. floor < 0 selects default_denominator_floor(eps).
RealVec gradient_step(const AdviceW& a, const RealVec& t, Real floor = -1);

// Header "N eps seed scale" then one coefficient row per vector. The lattice is
// supplied on reload; its dual basis is recomputed deterministically.
void write_advice(std::ostream& os, const AdviceW& a);
AdviceW read_advice(std::istream& is, const LatticeBasis& basis);

std::string format_real(Real x);

}  // namespace latgauss
