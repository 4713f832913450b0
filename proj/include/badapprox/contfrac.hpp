#pragma once

// Exact continued-fraction arithmetic over finite words of partial quotients.
//
// A real alpha in [0,1) is represented by the exact rational value of a
// finite word [a_1, ..., a_J]. Anything that reads index k requires k to lie
// inside the word and throws std::out_of_range otherwise.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "badapprox/numeric.hpp"

namespace badapprox::contfrac {

class CFWord {
 public:
  CFWord() = default;
  explicit CFWord(std::vector<int> quotients, std::optional<int> cap = std::nullopt);

  static CFWord parse(std::string_view text, std::optional<int> cap = std::nullopt);

  std::size_t length() const { return quotients_.size(); }
  // Partial quotient a_k, 1-based.
  int quotient(std::size_t k) const;
  const std::vector<int>& quotients() const { return quotients_; }
  std::optional<int> cap() const { return cap_; }
  // The cap if set, otherwise the largest partial quotient.
  int effective_cap() const;

  CFWord reversed() const;
  CFWord prefix(std::size_t len) const;
  CFWord suffix_from(std::size_t start) const;  // a_{start+1} ... a_J
  CFWord concat(const CFWord& tail) const;

  std::string to_string() const { return join_ints(quotients_); }

  bool operator==(const CFWord& other) const { return quotients_ == other.quotients_; }

 private:
  std::vector<int> quotients_;
  std::optional<int> cap_;
};

// p_k, q_k for k = -1 .. J.
class ConvergentTable {
 public:
  explicit ConvergentTable(const CFWord& word);

  int depth() const { return static_cast<int>(num_.size()) - 2; }
  const BigInt& num(int k) const { return num_.at(static_cast<std::size_t>(k + 1)); }
  const BigInt& den(int k) const { return den_.at(static_cast<std::size_t>(k + 1)); }
  // p_J / q_J.
  Rational value() const { return make_rational(num(depth()), den(depth())); }
  Rational convergent(int k) const { return make_rational(num(k), den(k)); }

 private:
  std::vector<BigInt> num_;
  std::vector<BigInt> den_;
};

ConvergentTable convergents(const CFWord& word);

// Exact value of [a_1, ..., a_J], evaluated back to front without the
// convergent recursion.
Rational nested_value(const CFWord& word);

struct ApproxErrorTable {
  CFWord word;
  Rational alpha;
  std::vector<Rational> errors;      // D_0 .. D_{J-1}, D_k = q_k alpha - p_k
  std::vector<Rational> remainders;  // r_0 .. r_{J-1}, r_k = [a_{k+1}, ..., a_J]

  // D_k for -1 <= k <= J, with D_{-1} = -1 and D_J = 0 for the finite word.
  Rational error(int k) const;
};

// Requires J >= 2.
ApproxErrorTable approx_errors(const CFWord& word);

// (p_J + t p_{J-1}) / (q_J + t q_{J-1}) for t in [0,1).
Rational compose_tail(const CFWord& word, const Rational& tail);

struct IdentityReport {
  bool recursion = true;      // p_{k+1} = a_{k+1} p_k + p_{k-1}, same for q
  bool determinant = true;    // p_{k-1} q_k - p_k q_{k-1} = (-1)^k
  bool coprime = true;        // gcd(p_k, q_k) = 1
  bool reversal = true;       // q_J(a) = q_J(reverse a)
  bool concatenation = true;  // 1 <= q_{k+l} / (q_k q_l) <= 2 at every split
  bool cf_inverse = true;     // q_{k-1}/q_k = [a_k, ..., a_1]
  bool q_size = true;         // 2^{(k-2)/2} <= q_k <= prod (a_i + 1)
  bool fibonacci_growth = true;  // q_{m+k} >= F_k q_m
  bool error_signs = true;    // sign D_k = (-1)^k
  bool error_sizes = true;    // |D_k| <= 1/q_{k+1}
  bool error_products = true; // D_k = (-1)^k r_0 ... r_k
  bool endpoint_sums = true;  // alternating a|D| partial sums telescope exactly
  bool tail_relation = true;  // D_k(t) = -D_{J'+k}(alpha)/D_{J'-1}(alpha)
  bool bad_lower_bound = true;  // ||n alpha|| >= 1/(2(M+1)n) for 1 <= n < q_J/2

  bool all() const;
  std::vector<std::pair<std::string, bool>> items() const;
};

// Inclusive n range checked exhaustively by the bad_lower_bound identity
// before falling back to the best-approximation denominators only.
inline constexpr long kBadBoundExhaustiveLimit = 200000;

IdentityReport identity_suite(const CFWord& word);

// Checks ||n p/q|| >= 1/(2(M+1)n) for 1 <= n <= min(n_max, (q-1)/2) by direct
// reduction.
bool check_bad_lower_bound_range(const ConvergentTable& table, int cap, long n_max);

}  // namespace badapprox::contfrac
