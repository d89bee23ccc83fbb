#pragma once
// Arbitrary-precision integers and rationals plus small exact-number helpers
// shared across the library. Values are immutable in spirit: every function
// returns fresh objects and never mutates shared state.

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace digsys {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct SingularMatrixError : Error {
  using Error::Error;
};
struct NotDivisibleError : Error {
  using Error::Error;
};
struct InvalidInputError : Error {
  using Error::Error;
};
struct BudgetExceededError : Error {
  using Error::Error;
};
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  std::size_t pos;
};

inline Int int_abs(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int int_gcd(const Int& a, const Int& b) {
  return boost::multiprecision::gcd(a, b);
}

inline Int int_lcm(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::lcm(a, b);
}

// Floor division and the matching remainder in [0, |b|).
inline Int floor_div(const Int& a, const Int& b) {
  if (b == 0) throw InvalidInputError("floor_div: division by zero");
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int mod_floor(const Int& a, const Int& b) {
  if (b == 0) throw InvalidInputError("mod_floor: division by zero");
  Int m = a % int_abs(b);
  if (m < 0) m += int_abs(b);
  return m;
}

inline bool divides(const Int& d, const Int& a) {
  if (d == 0) return a == 0;
  return a % d == 0;
}

struct ExtGcd {
  Int g, x, y;  // g = gcd(a,b) >= 0 and a*x + b*y = g
};

inline ExtGcd ext_gcd(Int a, Int b) {
  Int old_r = a, r = b;
  Int old_s = 1, s = 0;
  Int old_t = 0, t = 1;
  while (r != 0) {
    Int q = old_r / r;
    Int tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_r, old_s, old_t};
}

inline Int int_pow(Int base, unsigned long e) {
  Int r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline Int pow2(unsigned long e) { return Int(1) << e; }

// floor(sqrt(n)) for n >= 0.
inline Int isqrt_floor(const Int& n) {
  if (n < 0) throw InvalidInputError("isqrt_floor: negative argument");
  return boost::multiprecision::sqrt(n);
}

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

// Rational lower/upper bounds on sqrt(x), x >= 0, accurate to 2^-bits.
inline Rat sqrt_lower(const Rat& x, unsigned bits = 64) {
  if (x < 0) throw InvalidInputError("sqrt_lower: negative argument");
  if (x == 0) return Rat(0);
  Int num = numerator(x), den = denominator(x);
  Int scaled = num * den << (2 * bits);
  Int s = isqrt_floor(scaled);
  return Rat(s, den << bits);
}

inline Rat sqrt_upper(const Rat& x, unsigned bits = 64) {
  if (x < 0) throw InvalidInputError("sqrt_upper: negative argument");
  if (x == 0) return Rat(0);
  Int num = numerator(x), den = denominator(x);
  Int scaled = num * den << (2 * bits);
  Int s = isqrt_floor(scaled) + 1;
  return Rat(s, den << bits);
}

inline Int rat_floor(const Rat& q) {
  return floor_div(numerator(q), denominator(q));
}

inline Int rat_ceil(const Rat& q) { return -rat_floor(-q); }

inline std::string int_to_string(const Int& a) { return a.str(); }

inline std::string rat_to_string(const Rat& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

// Fixed-point decimal rendering for approximate diagnostics ("approx_*"
// fields). Never used for exact data.
inline std::string rat_to_decimal(const Rat& q, unsigned digits = 12) {
  Int scale = int_pow(10, digits);
  Int scaled = rat_floor(q * scale);
  bool neg = scaled < 0;
  Int mag = int_abs(scaled);
  std::string frac = Int(mag % scale).str();
  while (frac.size() < digits) frac.insert(frac.begin(), '0');
  std::string out = Int(mag / scale).str() + "." + frac;
  return neg ? "-" + out : out;
}

}  // namespace digsys
