#include "latgauss/rational.hpp"

#include <cmath>
#include <sstream>

namespace latgauss {

Rational to_rational(long double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value cannot be made rational");
  if (x == 0) return Rational(0);
  int exp = 0;
  long double mant = std::frexp(x, &exp);  // x = mant * 2^exp, 0.5 <= |mant| < 1
  // 64 mantissa bits fit in the scaled integer exactly.
  long double scaledm = std::ldexp(mant, 64);
  bool neg = scaledm < 0;
  if (neg) scaledm = -scaledm;
  auto hi = static_cast<std::uint64_t>(scaledm);
  Integer num(hi);
  if (neg) num = -num;
  int e = exp - 64;
  Rational q(num);
  if (e > 0) {
    Integer p = 1;
    p <<= e;
    q *= Rational(p);
  } else if (e < 0) {
    Integer p = 1;
    p <<= -e;
    q /= Rational(p);
  }
  return q;
}

Real to_real(const Rational& q) {
  // Split into numerator and denominator so huge components cannot overflow.
  Integer num = boost::multiprecision::numerator(q);
  Integer den = boost::multiprecision::denominator(q);
  if (num == 0) return 0;
  const bool neg = num < 0;
  if (neg) num = -num;
  const long nb = static_cast<long>(boost::multiprecision::msb(num));
  const long db = static_cast<long>(boost::multiprecision::msb(den));
  const long ns = nb > 80 ? nb - 80 : 0;
  const long ds = db > 80 ? db - 80 : 0;
  if (ns) num >>= ns;
  if (ds) den >>= ds;
  Real r = std::ldexp(num.convert_to<long double>() / den.convert_to<long double>(),
                      static_cast<int>(ns - ds));
  return neg ? -r : r;
}

Integer floor_rational(const Rational& q) {
  const Integer num = boost::multiprecision::numerator(q);
  const Integer den = boost::multiprecision::denominator(q);  // > 0
  Integer quo = num / den;  // truncates toward zero
  if (num < 0 && quo * den != num) quo -= 1;
  return quo;
}

Integer round_rational(const Rational& q) { return floor_rational(q + Rational(1, 2)); }

std::int64_t to_int64(const Integer& z) {
  if (z > Integer(std::numeric_limits<std::int64_t>::max()) ||
      z < Integer(std::numeric_limits<std::int64_t>::min()))
    throw LatticeError("integer coefficient exceeds 64 bits");
  return z.convert_to<std::int64_t>();
}

Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
  return s;
}

Rational norm2(const RationalVector& a) { return dot(a, a); }

RationalVector add(const RationalVector& a, const RationalVector& b) {
  RationalVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

RationalVector sub(const RationalVector& a, const RationalVector& b) {
  RationalVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RationalVector scaled(const RationalVector& a, const Rational& c) {
  RationalVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

void axpy(RationalVector& y, const Rational& c, const RationalVector& x) {
  if (c.is_zero()) return;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!x[i].is_zero()) y[i] += c * x[i];
}

RationalVector zero_vector(std::size_t m) { return RationalVector(m, Rational(0)); }

RealVec to_real(const RationalVector& v) {
  RealVec r(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<Eigen::Index>(i)) = to_real(v[i]);
  return r;
}

RationalVector to_rational(const RealVec& v) {
  RationalVector r(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) r[static_cast<std::size_t>(i)] = to_rational(v(i));
  return r;
}

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw DomainError("empty rational literal");
  auto valid_int = [](const std::string& t) {
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  auto strip_plus = [](std::string t) { return (!t.empty() && t[0] == '+') ? t.substr(1) : t; };
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (valid_int(s)) return Rational(Integer(strip_plus(s)));
    // decimal literal such as -0.25 or 1e-3: parse exactly as a decimal fraction
    std::size_t epos = s.find_first_of("eE");
    std::string mant = s.substr(0, epos);
    long exp10 = 0;
    if (epos != std::string::npos) {
      std::string es = s.substr(epos + 1);
      if (!valid_int(es)) throw DomainError("bad rational literal: " + s);
      exp10 = std::stol(es);
    }
    auto dot_pos = mant.find('.');
    if (dot_pos == std::string::npos) {
      if (!valid_int(mant)) throw DomainError("bad rational literal: " + s);
    } else {
      std::string frac = mant.substr(dot_pos + 1);
      mant = mant.substr(0, dot_pos) + frac;
      exp10 -= static_cast<long>(frac.size());
      if (mant == "-" || mant == "+" || mant.empty()) throw DomainError("bad rational literal: " + s);
      if (!valid_int(mant)) throw DomainError("bad rational literal: " + s);
    }
    Rational q{Integer(strip_plus(mant))};
    Integer ten = 1;
    for (long i = 0; i < std::labs(exp10); ++i) ten *= 10;
    if (exp10 >= 0) q *= Rational(ten);
    else q /= Rational(ten);
    return q;
  }
  std::string a = s.substr(0, slash), b = s.substr(slash + 1);
  if (!valid_int(a) || !valid_int(b)) throw DomainError("bad rational literal: " + s);
  Integer den(strip_plus(b));
  if (den == 0) throw DomainError("zero denominator: " + s);
  return Rational(Integer(strip_plus(a)), den);
}

std::string format_rational(const Rational& q) {
  // gmp keeps rationals canonical, so this is deterministic.
  const Integer den = boost::multiprecision::denominator(q);
  if (den == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw LatticeError("coefficient overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw LatticeError("coefficient overflow");
  return r;
}

}  // namespace latgauss
