#pragma once

#include "latgauss/types.hpp"

#include <Eigen/Dense>

#include <string>

namespace latgauss {

using RealVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using RealMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// Exact conversion of a binary float.
Rational to_rational(long double x);
Real to_real(const Rational& q);

Integer floor_rational(const Rational& q);
// Nearest integer, halves rounded up: floor(q + 1/2).
Integer round_rational(const Rational& q);
std::int64_t to_int64(const Integer& z);  // throws on overflow

Rational dot(const RationalVector& a, const RationalVector& b);
Rational norm2(const RationalVector& a);
RationalVector add(const RationalVector& a, const RationalVector& b);
RationalVector sub(const RationalVector& a, const RationalVector& b);
RationalVector scaled(const RationalVector& a, const Rational& c);
void axpy(RationalVector& y, const Rational& c, const RationalVector& x);  // y += c x
RationalVector zero_vector(std::size_t m);

RealVec to_real(const RationalVector& v);
RationalVector to_rational(const RealVec& v);

// "p/q" or integer; throws DomainError on junk.
Rational parse_rational(const std::string& s);
std::string format_rational(const Rational& q);

// Coefficient helpers with overflow checks.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

}  // namespace latgauss
