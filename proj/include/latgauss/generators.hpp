#pragma once

#include "latgauss/lattice.hpp"

namespace latgauss {

enum class GeneratorKind { Identity, Checkerboard, RandomInteger, RandomDualOrthogonal };

// Accepts "integer-identity" (alias "identity"), "checkerboard", "random-integer",
// "random-dual-orthogonal".
GeneratorKind parse_generator_kind(const std::string& name);
std::string to_string(GeneratorKind k);

struct LatticeGeneratorSpec {
  GeneratorKind kind = GeneratorKind::Identity;
  std::size_t n = 1;
  long long bound = 10;  // random-integer entry range; random-dual-orthogonal scale range
};

// identity: Z^n.
// checkerboard: (2e1, e1+e2, ..., e1+en), i.e. {z in Z^n : sum z_i even}.
// random-integer: entries uniform in [-bound, bound], redrawn until full rank.
// random-dual-orthogonal: rows of U * D * Q with Q a rational orthogonal
// (Cayley) matrix, D = diag(d_i), d_i in [1, bound], U unimodular. The lattice
// has the orthogonal basis d_i q_i, so its dual has the orthogonal basis q_i / d_i.
LatticeBasis generate_lattice(const LatticeGeneratorSpec& spec, std::uint64_t seed);

// The diagonal D of a random-dual-orthogonal draw (same seed, same spec).
std::vector<long long> dual_orthogonal_scales(const LatticeGeneratorSpec& spec, std::uint64_t seed);

// Q = (I - S)(I + S)^{-1} for skew-symmetric S.
RationalMatrix cayley_orthogonal(const RationalMatrix& skew);

}  // namespace latgauss
