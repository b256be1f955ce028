#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace latgauss {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

// Extended precision for every rho-sum (64-bit mantissa on x86-64).
using Real = long double;

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;  // row-major
using Coefficients = std::vector<std::int64_t>;
using RealVector = std::vector<Real>;

class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankDeficientError : public LatticeError {
 public:
  using LatticeError::LatticeError;
};

class DomainError : public LatticeError {
 public:
  using LatticeError::LatticeError;
};

// Enumeration ran past its node budget. `partial_count` is the number of
// points accepted before the search was abandoned.
class BudgetExceededError : public LatticeError {
 public:
  BudgetExceededError(const std::string& what, std::uint64_t partial_count)
      : LatticeError(what), partial_count_(partial_count) {}
  std::uint64_t partial_count() const { return partial_count_; }

 private:
  std::uint64_t partial_count_;
};

inline constexpr Real kPi = 3.141592653589793238462643383279502884L;

}  // namespace latgauss
