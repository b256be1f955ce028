#include "latgauss/decoder.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace latgauss {

std::size_t decoder_iterations(std::size_t n, Real eps) {
  const auto sd = s_eps_delta_max(eps);
  const Real ratio = 8 * std::log(std::sqrt(static_cast<Real>(n)) * sd.s_eps) / std::log(1 / eps);
  return 1 + static_cast<std::size_t>(std::max<Real>(0, std::ceil(ratio)));
}

namespace {

void fill_constants(DecoderAdvice& d) {
  const auto sd = s_eps_delta_max(d.eps);
  d.s_eps = sd.s_eps;
  d.delta_max = sd.delta_max;
  d.iterations = decoder_iterations(d.original_basis.rank(), d.eps);
}

}  // namespace

DecoderAdvice assemble_decoder(const LatticeBasis& basis, AdviceW advice) {
  DecoderAdvice d;
  d.original_basis = basis;
  d.scale = advice.source_scale;
  d.eps = advice.eps;
  fill_constants(d);
  const std::size_t n = basis.rank();
  // |w / scale| <= sqrt(n), checked exactly via |w|^2 <= n scale^2
  const Rational bound = Rational(static_cast<long>(n)) * to_rational(d.scale) * to_rational(d.scale);
  RationalMatrix chosen;
  for (std::size_t i = 0; i < advice.N() && chosen.size() < n; ++i) {
    RationalVector w = advice.exact(i);
    if (norm2(w) > bound) continue;
    RationalMatrix trial = chosen;
    trial.push_back(w);
    try {
      LatticeBasis probe(trial, basis.ambient_dim());
      (void)probe;
    } catch (const RankDeficientError&) {
      continue;
    }
    chosen.push_back(std::move(w));
    d.v_star_index.push_back(i);
  }
  if (chosen.size() < n) throw FrameAbortError("advice has no " + std::to_string(n) + " independent short vectors");
  d.v_star = chosen;
  d.v_frame = dual_basis(LatticeBasis(chosen, basis.ambient_dim())).vectors();
  d.advice = std::move(advice);
  return d;
}

DecoderAdvice preprocess(const LatticeBasis& basis, Real eps, std::size_t N, std::uint64_t seed,
                         const SamplerOptions& opts) {
  if (!(eps > 0 && eps < Real(1) / 200)) throw DomainError("decoder requires 0 < eps < 1/200");
  const Real eta = smoothing_parameter(basis.dual(), eps).eta;
  return assemble_decoder(basis, generate_advice(basis, eps, N, seed, eta, eta, opts));
}

bool frame_identity_holds(const DecoderAdvice& a) {
  const std::size_t n = a.original_basis.rank();
  if (a.v_star.size() != n || a.v_frame.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (dot(a.v_star[i], a.v_frame[j]) != Rational(i == j ? 1 : 0)) return false;
  return true;
}

std::string to_string(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::ExactClaimed: return "exact-claimed";
    case DecodeStatus::DenominatorGuard: return "denominator-guard";
    case DecodeStatus::FrameAbort: return "frame-abort";
    case DecodeStatus::OffLattice: return "off-lattice";
  }
  return "unknown";
}

DecodeResult decode(const DecoderAdvice& a, const RealVec& target) {
  DecodeResult r;
  const std::size_t n = a.original_basis.rank();
  if (a.v_star.size() != n || a.v_frame.size() != n) {
    r.status = DecodeStatus::FrameAbort;
    return r;
  }
  RealVec t = a.original_basis.project_to_span(target) * a.scale;
  std::vector<RealVec> path{t};
  std::vector<Real> fvals;
  for (std::size_t k = 0; k < a.iterations; ++k) {
    const EstimatorPoint e = evaluate_f_W(a.advice, t);
    fvals.push_back(e.value);
    const Real floor = default_denominator_floor(a.eps);
    if (!(std::fabs(e.value) >= floor)) {
      r.status = DecodeStatus::DenominatorGuard;
      break;
    }
    t += e.gradient / (2 * kPi * e.value);
    path.push_back(t);
    ++r.iterations_run;
  }
  // c_i = round(<v*_i / scale, t>); the output is sum_i c_i v_i exactly
  r.vector = zero_vector(a.original_basis.ambient_dim());
  for (std::size_t i = 0; i < n; ++i) {
    const Real ip = a.advice.row(a.v_star_index[i]).dot(t);
    const auto c = static_cast<long long>(std::llround(ip));
    if (c != 0) axpy(r.vector, Rational(c), a.v_frame[i]);
  }
  r.coefficients = a.original_basis.coefficients(r.vector);
  if (!r.coefficients && r.status == DecodeStatus::ExactClaimed) r.status = DecodeStatus::OffLattice;
  const RealVec out = to_real(r.vector) * a.scale;
  for (std::size_t k = 0; k < path.size(); ++k)
    r.trace.push_back({(path[k] - out).norm(), k < fvals.size() ? fvals[k] : std::numeric_limits<Real>::quiet_NaN()});
  return r;
}

DecodeResult decode(const DecoderAdvice& a, const RationalVector& target) { return decode(a, to_real(target)); }

Real decoding_radius_from_eta(Real dual_eta, Real eps) {
  const auto sd = s_eps_delta_max(eps);
  return sd.delta_max * sd.s_eps / dual_eta;
}

Real decoding_radius(const DecoderAdvice& a) { return a.delta_max * a.s_eps / a.scale; }

Real decoding_radius(const LatticeBasis& basis, Real eps) {
  return decoding_radius_from_eta(smoothing_parameter(basis.dual(), eps).eta, eps);
}

ParamPlan bdd_param_plan(Real alpha, std::size_t n, Real c) {
  if (!(alpha > 0 && alpha < 0.5L)) throw DomainError("bdd_param_plan requires 0 < alpha < 1/2");
  if (n == 0) throw DomainError("bdd_param_plan requires n >= 1");
  const Real nn = static_cast<Real>(n);
  const Real g = 1 - 2 * alpha;
  const Real expo = 2 * alpha * alpha * nn / (g * g) + 8 / g;
  // 1/eps = exp(expo)/2 - 1, so log(1/eps) = expo - log 2 + log(1 - 2 exp(-expo))
  const Real log_inv = expo - std::log(Real(2)) + std::log1p(-2 * std::exp(-expo));
  if (!(log_inv > std::log(Real(200)))) throw DomainError("planned eps >= 1/200; use a larger n or smaller alpha");
  const Real logN = std::log(c * alpha * alpha * nn * nn / (g * g)) + alpha * alpha * nn / (g * g) + 4 / g;
  const std::size_t N = logN >= 44 ? std::numeric_limits<std::size_t>::max()
                                   : static_cast<std::size_t>(std::ceil(std::exp(logN)));
  return {std::exp(-log_inv), log_inv, logN, N};
}

void write_decoder_advice(std::ostream& os, const DecoderAdvice& a) {
  write_advice(os, a.advice);
  os << "lattice\n";
  write_lattice(os, a.original_basis);
  os << "frame\n";
  for (std::size_t i = 0; i < a.v_star_index.size(); ++i) os << (i ? " " : "") << a.v_star_index[i];
  os << '\n';
  for (const auto& v : a.v_frame) {
    for (std::size_t j = 0; j < v.size(); ++j) os << (j ? " " : "") << format_rational(v[j]);
    os << '\n';
  }
}

DecoderAdvice read_decoder_advice(std::istream& is) {
  // The advice block precedes the lattice it needs, so buffer it first.
  std::string line, block;
  while (std::getline(is, line) && line != "lattice") block += line + '\n';
  if (line != "lattice") throw DomainError("decoder advice: missing lattice block");
  LatticeBasis basis = read_lattice(is);
  std::string tag;
  if (!(is >> tag) || tag != "frame") throw DomainError("decoder advice: missing frame block");
  std::istringstream adv(block);
  DecoderAdvice d;
  d.original_basis = basis;
  d.advice = read_advice(adv, basis);
  d.scale = d.advice.source_scale;
  d.eps = d.advice.eps;
  fill_constants(d);
  const std::size_t n = basis.rank();
  d.v_star_index.resize(n);
  for (auto& i : d.v_star_index) {
    if (!(is >> i) || i >= d.advice.N()) throw DomainError("decoder advice: bad frame index");
    d.v_star.push_back(d.advice.exact(i));
  }
  d.v_frame.assign(n, RationalVector(basis.ambient_dim()));
  for (auto& v : d.v_frame)
    for (auto& x : v) {
      std::string tok;
      if (!(is >> tok)) throw DomainError("decoder advice: truncated frame");
      x = parse_rational(tok);
    }
  return d;
}

void write_decoder_advice_file(const std::string& path, const DecoderAdvice& a) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path);
  write_decoder_advice(f, a);
}

DecoderAdvice read_decoder_advice_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot read " + path);
  return read_decoder_advice(f);
}

}  // namespace latgauss
