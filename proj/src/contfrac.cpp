#include "badapprox/contfrac.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace badapprox::contfrac {

CFWord::CFWord(std::vector<int> quotients, std::optional<int> cap)
    : quotients_(std::move(quotients)), cap_(cap) {
  if (quotients_.empty()) throw std::invalid_argument("CFWord: word must be non-empty");
  if (cap_ && *cap_ < 1) throw std::invalid_argument("CFWord: cap must be >= 1");
  for (std::size_t i = 0; i < quotients_.size(); ++i) {
    int a = quotients_[i];
    if (a < 1)
      throw std::invalid_argument("CFWord: partial quotient a_" + std::to_string(i + 1) +
                                  " = " + std::to_string(a) + " is below 1");
    if (cap_ && a > *cap_)
      throw std::invalid_argument("CFWord: partial quotient a_" + std::to_string(i + 1) +
                                  " = " + std::to_string(a) + " exceeds cap " +
                                  std::to_string(*cap_));
  }
}

CFWord CFWord::parse(std::string_view text, std::optional<int> cap) {
  return CFWord(parse_int_list(text), cap);
}

int CFWord::quotient(std::size_t k) const {
  if (k < 1 || k > quotients_.size())
    throw std::out_of_range("CFWord: index " + std::to_string(k) + " outside 1.." +
                            std::to_string(quotients_.size()));
  return quotients_[k - 1];
}

int CFWord::effective_cap() const {
  return cap_ ? *cap_ : *std::max_element(quotients_.begin(), quotients_.end());
}

CFWord CFWord::reversed() const {
  return CFWord(std::vector<int>(quotients_.rbegin(), quotients_.rend()), cap_);
}

CFWord CFWord::prefix(std::size_t len) const {
  if (len < 1 || len > quotients_.size()) throw std::out_of_range("CFWord::prefix: bad length");
  return CFWord(std::vector<int>(quotients_.begin(), quotients_.begin() + static_cast<long>(len)), cap_);
}

CFWord CFWord::suffix_from(std::size_t start) const {
  if (start >= quotients_.size()) throw std::out_of_range("CFWord::suffix_from: empty suffix");
  return CFWord(std::vector<int>(quotients_.begin() + static_cast<long>(start), quotients_.end()), cap_);
}

CFWord CFWord::concat(const CFWord& tail) const {
  std::vector<int> out = quotients_;
  out.insert(out.end(), tail.quotients_.begin(), tail.quotients_.end());
  std::optional<int> cap;
  if (cap_ && tail.cap_) cap = std::max(*cap_, *tail.cap_);
  return CFWord(std::move(out), cap);
}

ConvergentTable::ConvergentTable(const CFWord& word) {
  const std::size_t J = word.length();
  num_.resize(J + 2);
  den_.resize(J + 2);
  num_[0] = 1;  // p_{-1}
  num_[1] = 0;  // p_0
  den_[0] = 0;  // q_{-1}
  den_[1] = 1;  // q_0
  for (std::size_t k = 1; k <= J; ++k) {
    const long a = word.quotient(k);
    num_[k + 1] = a * num_[k] + num_[k - 1];
    den_[k + 1] = a * den_[k] + den_[k - 1];
  }
}

ConvergentTable convergents(const CFWord& word) { return ConvergentTable(word); }

Rational nested_value(const CFWord& word) {
  Rational x = 0;
  const auto& a = word.quotients();
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    x = 1 / (Rational(*it) + x);
  }
  return x;
}

Rational ApproxErrorTable::error(int k) const {
  const int J = static_cast<int>(word.length());
  if (k == -1) return Rational(-1);
  if (k == J) return Rational(0);
  if (k < -1 || k > J) throw std::out_of_range("ApproxErrorTable: index outside -1..J");
  return errors[static_cast<std::size_t>(k)];
}

ApproxErrorTable approx_errors(const CFWord& word) {
  const int J = static_cast<int>(word.length());
  if (J < 2) throw std::invalid_argument("approx_errors: word length must be at least 2");
  ConvergentTable table(word);
  ApproxErrorTable out{word, table.value(), {}, {}};
  out.errors.reserve(static_cast<std::size_t>(J));
  for (int k = 0; k < J; ++k) {
    out.errors.push_back(Rational(table.den(k)) * out.alpha - Rational(table.num(k)));
  }
  // r_k = [a_{k+1}, ..., a_J], built from the back: r_{J-1} = 1/a_J.
  out.remainders.assign(static_cast<std::size_t>(J), Rational(0));
  Rational r = 0;
  for (int k = J - 1; k >= 0; --k) {
    r = 1 / (Rational(word.quotient(static_cast<std::size_t>(k + 1))) + r);
    out.remainders[static_cast<std::size_t>(k)] = r;
  }
  return out;
}

Rational compose_tail(const CFWord& word, const Rational& tail) {
  if (tail < 0 || tail >= 1) throw std::invalid_argument("compose_tail: tail must lie in [0,1)");
  ConvergentTable table(word);
  const int J = table.depth();
  Rational num = Rational(table.num(J)) + tail * Rational(table.num(J - 1));
  Rational den = Rational(table.den(J)) + tail * Rational(table.den(J - 1));
  Rational out = num / den;
  out.canonicalize();
  return out;
}

bool IdentityReport::all() const {
  for (const auto& [name, ok] : items())
    if (!ok) return false;
  return true;
}

std::vector<std::pair<std::string, bool>> IdentityReport::items() const {
  return {{"recursion", recursion},
          {"determinant", determinant},
          {"coprime", coprime},
          {"reversal", reversal},
          {"concatenation", concatenation},
          {"cf_inverse", cf_inverse},
          {"q_size", q_size},
          {"fibonacci_growth", fibonacci_growth},
          {"error_signs", error_signs},
          {"error_sizes", error_sizes},
          {"error_products", error_products},
          {"endpoint_sums", endpoint_sums},
          {"tail_relation", tail_relation},
          {"bad_lower_bound", bad_lower_bound}};
}

bool check_bad_lower_bound_range(const ConvergentTable& table, int cap, long n_max) {
  const int J = table.depth();
  const BigInt& p = table.num(J);
  const BigInt& q = table.den(J);
  const unsigned long factor = 2UL * static_cast<unsigned long>(cap + 1);
  const BigInt n_top = (q - 1) / 2;
  if (n_top.fits_slong_p()) n_max = std::min(n_max, n_top.get_si());
  if (n_max < 1) return true;
  if (q.fits_ulong_p() && q.get_ui() < (1UL << 62)) {
    using u128 = unsigned __int128;
    const std::uint64_t qq = q.get_ui();
    const std::uint64_t pp = BigInt(p % q).get_ui();
    std::uint64_t r = 0;
    for (long n = 1; n <= n_max; ++n) {
      r += pp;
      if (r >= qq) r -= qq;
      const std::uint64_t d = std::min(r, qq - r);
      if (static_cast<u128>(d) * factor * static_cast<u128>(n) < qq) return false;
    }
    return true;
  }
  BigInt r = 0, d, lhs;
  const BigInt pp = p % q;
  for (long n = 1; n <= n_max; ++n) {
    r += pp;
    if (r >= q) r -= q;
    d = q - r;
    if (r < d) d = r;
    lhs = d * factor;
    lhs *= static_cast<unsigned long>(n);
    if (lhs < q) return false;
  }
  return true;
}

namespace {

BigInt fibonacci(int k) {
  BigInt a = 0, b = 1;  // F_0, F_1
  for (int i = 0; i < k; ++i) {
    BigInt c = a + b;
    a = b;
    b = c;
  }
  return a;
}

}  // namespace

IdentityReport identity_suite(const CFWord& word) {
  const int J = static_cast<int>(word.length());
  if (J < 2) throw std::invalid_argument("identity_suite: word length must be at least 2");
  IdentityReport rep;
  const ConvergentTable t(word);
  const ApproxErrorTable err = approx_errors(word);

  if (t.num(-1) != 1 || t.num(0) != 0 || t.den(-1) != 0 || t.den(0) != 1) rep.recursion = false;
  for (int k = 0; k < J; ++k) {
    const long a = word.quotient(static_cast<std::size_t>(k + 1));
    if (t.num(k + 1) != a * t.num(k) + t.num(k - 1)) rep.recursion = false;
    if (t.den(k + 1) != a * t.den(k) + t.den(k - 1)) rep.recursion = false;
  }
  if (nested_value(word) != t.value()) rep.recursion = false;

  for (int k = 1; k <= J; ++k) {
    BigInt det = t.num(k - 1) * t.den(k) - t.num(k) * t.den(k - 1);
    if (det != (k % 2 == 0 ? 1 : -1)) rep.determinant = false;
    BigInt g;
    mpz_gcd(g.get_mpz_t(), t.num(k).get_mpz_t(), t.den(k).get_mpz_t());
    if (g != 1) rep.coprime = false;
  }

  if (ConvergentTable(word.reversed()).den(J) != t.den(J)) rep.reversal = false;

  for (int k = 1; k < J; ++k) {
    const BigInt& whole = t.den(J);
    const BigInt& left = t.den(k);
    const BigInt right = ConvergentTable(word.suffix_from(static_cast<std::size_t>(k))).den(J - k);
    const BigInt prod = left * right;
    if (whole < prod || whole > 2 * prod) rep.concatenation = false;
  }

  for (int k = 1; k <= J; ++k) {
    Rational ratio = make_rational(t.den(k - 1), t.den(k));
    if (ratio != nested_value(word.prefix(static_cast<std::size_t>(k)).reversed()))
      rep.cf_inverse = false;
  }

  BigInt prod = 1;
  for (int k = 1; k <= J; ++k) {
    prod *= word.quotient(static_cast<std::size_t>(k)) + 1;
    // 2^{(k-2)/2} <= q_k  <=>  2^k <= 4 q_k^2
    if (pow_big(2, static_cast<unsigned long>(k)) > 4 * t.den(k) * t.den(k)) rep.q_size = false;
    if (t.den(k) > prod) rep.q_size = false;
  }

  for (int m = 0; m <= J; ++m) {
    for (int k = 0; m + k <= J; ++k) {
      if (t.den(m + k) < fibonacci(k) * t.den(m)) rep.fibonacci_growth = false;
    }
  }

  for (int k = 0; k < J; ++k) {
    const Rational& D = err.errors[static_cast<std::size_t>(k)];
    if (sgn(D) != (k % 2 == 0 ? 1 : -1)) rep.error_signs = false;
    if (k >= 1 && abs(D) * Rational(t.den(k + 1)) > 1) rep.error_sizes = false;
  }

  Rational running = 1;
  for (int k = 0; k < J; ++k) {
    running *= err.remainders[static_cast<std::size_t>(k)];
    const Rational expected = (k % 2 == 0) ? running : Rational(-running);
    if (expected != err.errors[static_cast<std::size_t>(k)]) rep.error_products = false;
  }

  // |D_{k-2}| = sum_{i<I} a_{k+2i} |D_{k+2i-1}| + |D_{k+2I-2}|, with D_J = 0.
  for (int k = 1; k <= J; ++k) {
    const Rational target = abs(err.error(k - 2));
    Rational partial = 0;
    int i = 0;
    for (; k + 2 * i <= J; ++i) {
      partial += word.quotient(static_cast<std::size_t>(k + 2 * i)) * abs(err.error(k + 2 * i - 1));
      if (partial > target) rep.endpoint_sums = false;
    }
    if (partial + abs(err.error(k + 2 * i - 2)) != target) rep.endpoint_sums = false;
  }

  for (int split = 1; split < J; ++split) {
    const CFWord tail_word = word.suffix_from(static_cast<std::size_t>(split));
    const ConvergentTable tt(tail_word);
    const Rational tail = tt.value();
    const Rational denom = err.error(split - 1);
    for (int k = 0; k < J - split; ++k) {
      const Rational lhs = Rational(tt.den(k)) * tail - Rational(tt.num(k));
      const Rational rhs = -err.error(split + k) / denom;
      if (lhs != rhs) rep.tail_relation = false;
    }
  }

  // 1 <= n < q_J/2: exhaustive up to a limit, then the best-approximation
  // denominators q_k that lie beyond it.
  {
    const int cap = word.effective_cap();
    const BigInt n_top = (t.den(J) - 1) / 2;
    const bool fits64 = t.den(J).fits_ulong_p() && t.den(J).get_ui() < (1UL << 62);
    const long limit = fits64 ? kBadBoundExhaustiveLimit : kBadBoundExhaustiveLimit / 10;
    const long n_max = n_top.fits_slong_p() ? std::min(n_top.get_si(), limit) : limit;
    if (!check_bad_lower_bound_range(t, cap, n_max)) rep.bad_lower_bound = false;
    for (int k = 1; k < J; ++k) {
      const BigInt& n = t.den(k);
      if (n <= n_max || n > n_top) continue;
      BigInt r = (n * t.num(J)) % t.den(J);
      BigInt d = t.den(J) - r;
      if (r < d) d = r;
      if (d * 2 * (cap + 1) * n < t.den(J)) rep.bad_lower_bound = false;
    }
  }
  return rep;
}

}  // namespace badapprox::contfrac
