#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace badapprox {

using BigInt = mpz_class;
using Rational = mpq_class;

// Raised when a truncated word is too short for the requested precision.
class DepthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an enumeration or sampling guard would be exceeded.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline BigInt floor_of(const Rational& x) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return out;
}

// Fractional part in [0, 1).
inline Rational frac(const Rational& x) { return x - Rational(floor_of(x)); }

// Distance to the nearest integer.
inline Rational dist_to_int(const Rational& x) {
  Rational f = frac(x);
  Rational g = 1 - f;
  return f < g ? f : g;
}

inline int sign_of(const Rational& x) { return sgn(x); }

inline Rational abs_of(const Rational& x) { return abs(x); }

// Natural log of a positive big integer, accurate to double precision.
double log_big(const BigInt& n);

inline double to_double(const Rational& x) { return x.get_d(); }

// Exact value of a finite double as a rational.
Rational rational_from_double(double x);

std::string to_string(const BigInt& n);
std::string to_string(const Rational& r);  // "num/den" in lowest terms

BigInt parse_bigint(std::string_view text);
// Accepts "num/den", an integer, or a decimal literal (taken exactly).
Rational parse_rational(std::string_view text);

// Comma-separated integers, e.g. "1,2,3". Also accepts "2x60" run notation
// and mixed forms like "1,2x5,3".
std::vector<int> parse_int_list(std::string_view text);
std::string join_ints(const std::vector<int>& values);

// Exact a^e for a non-negative integer exponent.
BigInt pow_big(const BigInt& base, unsigned long exponent);

}  // namespace badapprox
