#pragma once

#include "latgauss/estimator.hpp"

namespace latgauss {

class FrameAbortError : public LatticeError {
 public:
  using LatticeError::LatticeError;
};

// Advice for the scaled lattice scale * L, scale = eta_eps(L*), whose dual
// has smoothing parameter 1.
struct DecoderAdvice {
  LatticeBasis original_basis;
  Real scale = 1;
  AdviceW advice;                     // source_scale == scale
  std::vector<std::size_t> v_star_index;  // into advice, first n independent short ones
  RationalMatrix v_star;              // unscaled dual vectors
  RationalMatrix v_frame;             // <v_star[i], v_frame[j]> = delta_ij
  Real eps = 0;
  std::size_t iterations = 0;
  Real s_eps = 0, delta_max = 0;
};

// 1 + ceil(8 log(sqrt(n) s_eps) / log(1/eps)).
std::size_t decoder_iterations(std::size_t n, Real eps);

DecoderAdvice preprocess(const LatticeBasis& basis, Real eps, std::size_t N, std::uint64_t seed,
                         const SamplerOptions& opts = {});
// Rebuilds the frame from an existing advice list (scale must be eta_eps(L*)).
DecoderAdvice assemble_decoder(const LatticeBasis& basis, AdviceW advice);

bool frame_identity_holds(const DecoderAdvice& a);

enum class DecodeStatus { ExactClaimed, DenominatorGuard, FrameAbort, OffLattice };
std::string to_string(DecodeStatus s);

struct TraceEntry {
  Real norm;  // |t_k - scale * output|, scaled units; k = 0 is the input
  Real f_value;  // f_W(t_k); NaN for the final entry when no step followed
};

struct DecodeResult {
  RationalVector vector;
  std::optional<Coefficients> coefficients;  // over original_basis when a member
  std::size_t iterations_run = 0;
  std::vector<TraceEntry> trace;
  DecodeStatus status = DecodeStatus::ExactClaimed;
};

DecodeResult decode(const DecoderAdvice& a, const RealVec& target);
DecodeResult decode(const DecoderAdvice& a, const RationalVector& target);

Real decoding_radius(const DecoderAdvice& a);
Real decoding_radius(const LatticeBasis& basis, Real eps);
Real decoding_radius_from_eta(Real dual_eta, Real eps);

struct ParamPlan {
  Real eps;
  Real log_inv_eps;  // log(1/eps), kept to avoid underflow for large n
  Real log_N;
  std::size_t N;  // saturates at SIZE_MAX
};
// eps and N for BDD_alpha; c is the constant in front of N.
ParamPlan bdd_param_plan(Real alpha, std::size_t n, Real c = 2);

// Advice block, then "lattice" + lattice block, then "frame" + index line + frame rows.
void write_decoder_advice(std::ostream& os, const DecoderAdvice& a);
DecoderAdvice read_decoder_advice(std::istream& is);
void write_decoder_advice_file(const std::string& path, const DecoderAdvice& a);
DecoderAdvice read_decoder_advice_file(const std::string& path);

}  // namespace latgauss
