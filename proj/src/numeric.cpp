#include "badapprox/numeric.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace badapprox {

double log_big(const BigInt& n) {
  if (sgn(n) <= 0) throw std::domain_error("log_big: argument must be positive");
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, n.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("rational_from_double: non-finite value");
  Rational r;
  mpq_set_d(r.get_mpq_t(), x);
  r.canonicalize();
  return r;
}

std::string to_string(const BigInt& n) { return n.get_str(); }

std::string to_string(const Rational& r) {
  Rational c(r);
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  return value;
}

}  // namespace

BigInt parse_bigint(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  BigInt out;
  if (text.empty() || out.set_str(std::string(text), 10) != 0)
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  return out;
}

Rational parse_rational(std::string_view text) {
  text = trim(text);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_bigint(text.substr(0, slash));
    BigInt den = parse_bigint(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return make_rational(num, den);
  }
  if (auto dot = text.find_first_of(".eE"); dot != std::string_view::npos) {
    // Decimal literal, read exactly: mantissa digits over a power of ten.
    std::string s(text);
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
      negative = s[0] == '-';
      s.erase(0, 1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
      exponent = std::stol(s.substr(e + 1));
      s.erase(e);
    }
    if (auto d = s.find('.'); d != std::string::npos) {
      exponent -= static_cast<long>(s.size() - d - 1);
      s.erase(d, 1);
    }
    BigInt mant = parse_bigint(s);
    if (negative) mant = -mant;
    BigInt ten_pow = pow_big(10, static_cast<unsigned long>(std::labs(exponent)));
    return exponent >= 0 ? Rational(mant * ten_pow) : make_rational(mant, ten_pow);
  }
  return Rational(parse_bigint(text));
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string_view item =
        trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (auto x = item.find('x'); x != std::string_view::npos) {
      int value = parse_int(item.substr(0, x));
      int count = parse_int(item.substr(x + 1));
      if (count < 0) throw std::invalid_argument("negative repeat count");
      out.insert(out.end(), static_cast<std::size_t>(count), value);
    } else {
      out.push_back(parse_int(item));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    os << values[i];
  }
  return os.str();
}

BigInt pow_big(const BigInt& base, unsigned long exponent) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

}  // namespace badapprox
