#include "latgauss/estimator.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace latgauss {

DenominatorTooSmallError::DenominatorTooSmallError(Real value, Real floor)
    : LatticeError("|f_W(t)| = " + format_real(value) + " below floor " + format_real(floor)),
      value_(value),
      floor_(floor) {}

std::string format_real(Real x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", x);
  return buf;
}

AdviceW make_advice(LatticeBasis dual, std::vector<Coefficients> coefficients, Real eps, std::uint64_t seed,
                    Real scale) {
  if (!(scale > 0)) throw DomainError("advice scale must be positive");
  AdviceW a;
  a.dual = std::move(dual);
  a.coefficients = std::move(coefficients);
  a.eps = eps;
  a.seed = seed;
  a.source_scale = scale;
  const auto m = static_cast<Eigen::Index>(a.dual.ambient_dim());
  a.coords.resize(static_cast<Eigen::Index>(a.coefficients.size()), m);
  for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
    if (a.coefficients[i].size() != a.dual.rank()) throw DomainError("advice coefficient length mismatch");
    // exact combination first, so reload reproduces identical floats
    a.coords.row(static_cast<Eigen::Index>(i)) = to_real(a.dual.combine(a.coefficients[i])).transpose() / scale;
  }
  return a;
}

AdviceW generate_advice(const LatticeBasis& basis, Real eps, std::size_t N, std::uint64_t seed, Real scale,
                        Real eta, const SamplerOptions& opts) {
  if (!(eps > 0 && eps < Real(1) / 200)) throw DomainError("advice requires 0 < eps < 1/200");
  if (N == 0) throw DomainError("advice requires N >= 1");
  LatticeBasis dual = basis.dual();
  if (!(eta > 0)) eta = smoothing_parameter(dual, eps).eta;
  DgsSampleSet s = sample_discrete_gaussian(dual, eta, N, seed, opts);
  return make_advice(std::move(dual), std::move(s.coefficients), eps, seed, scale);
}

namespace {

// 2 pi <w_i, t> reduced mod 2 pi through the fractional part, so a lattice
// shift of t changes each phase only by float noise.
RealVec phases(const AdviceW& a, const RealVec& t) {
  if (static_cast<std::size_t>(t.size()) != a.ambient_dim()) throw DomainError("target dimension mismatch");
  RealVec p = a.coords * t;
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = 2 * kPi * (p(i) - std::floor(p(i) + 0.5L));
  return p;
}

// Phases lie in [-pi, pi], where double trig is accurate to 1e-16. That is far below
// the sampling error of f_W and several times faster than long double.
double cos_phase(Real p) { return std::cos(static_cast<double>(p)); }
double sin_phase(Real p) { return std::sin(static_cast<double>(p)); }

}  // namespace

Real f_W(const AdviceW& a, const RealVec& t) {
  if (a.N() == 0) throw DomainError("empty advice");
  const RealVec p = phases(a, t);
  Real s = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) s += cos_phase(p(i));
  return s / static_cast<Real>(a.N());
}

EstimatorPoint evaluate_f_W(const AdviceW& a, const RealVec& t) {
  if (a.N() == 0) throw DomainError("empty advice");
  const RealVec p = phases(a, t);
  Real s = 0;
  RealVec sn(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    s += cos_phase(p(i));
    sn(i) = sin_phase(p(i));
  }
  const Real inv = 1 / static_cast<Real>(a.N());
  return {s * inv, RealVec(-2 * kPi * inv * (a.coords.transpose() * sn))};
}

RealVec grad_f_W(const AdviceW& a, const RealVec& t) { return evaluate_f_W(a, t).gradient; }

RealMat hessian_f_W(const AdviceW& a, const RealVec& t) {
  if (a.N() == 0) throw DomainError("empty advice");
  const RealVec p = phases(a, t);
  RealVec c(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) c(i) = cos_phase(p(i));
  RealMat h = a.coords.transpose() * c.asDiagonal() * a.coords;
  h = ((h + h.transpose()) / 2).eval();
  return -4 * kPi * kPi / static_cast<Real>(a.N()) * h;
}

RealVec gradient_step(const AdviceW& a, const RealVec& t, Real floor) {
  if (floor < 0) floor = default_denominator_floor(a.eps);
  const EstimatorPoint e = evaluate_f_W(a, t);
  if (!(std::fabs(e.value) >= floor)) throw DenominatorTooSmallError(e.value, floor);
  return t + e.gradient / (2 * kPi * e.value);
}

void write_advice(std::ostream& os, const AdviceW& a) {
  os << a.N() << ' ' << format_real(a.eps) << ' ' << a.seed << ' ' << format_real(a.source_scale) << '\n';
  for (const auto& c : a.coefficients) {
    for (std::size_t j = 0; j < c.size(); ++j) os << (j ? " " : "") << c[j];
    os << '\n';
  }
}

AdviceW read_advice(std::istream& is, const LatticeBasis& basis) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("advice: missing header");
  std::istringstream h(line);
  std::size_t n = 0;
  std::string eps_s, scale_s;
  std::uint64_t seed = 0;
  if (!(h >> n >> eps_s >> seed >> scale_s)) throw DomainError("advice: malformed header");
  const Real eps = std::strtold(eps_s.c_str(), nullptr);
  const Real scale = std::strtold(scale_s.c_str(), nullptr);
  const std::size_t k = basis.rank();
  std::vector<Coefficients> coeffs(n, Coefficients(k));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (!(is >> coeffs[i][j])) throw DomainError("advice: truncated coefficient block");
  return make_advice(basis.dual(), std::move(coeffs), eps, seed, scale);
}

}  // namespace latgauss
