#pragma once

// Ostrowski numeration of reals and integers relative to a finite word.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "badapprox/contfrac.hpp"

namespace badapprox::ostrowski {

using contfrac::CFWord;
using contfrac::ConvergentTable;

// Range of the first digit: 0 <= b_1 <= a_1 - 1, or the stricter 1 <= b_1.
enum class LeadingDigit { AllowZero, Positive };

struct OstrowskiDigits {
  CFWord word;
  std::vector<int> b;  // b_1 .. b_J
  Rational residual;   // gamma - sum b_{k+1} D_k
};

struct IntegerOstrowski {
  CFWord word;
  std::vector<int> c;  // c_1 .. c_{K+1}
  BigInt n;
  int K = 0;
};

struct NagReport {
  int m = 0;                  // smallest index with delta_{m+1} != 0, J if none
  std::vector<int> delta;     // delta_1 .. delta_J
  Rational S;
  Rational dist;              // ||n alpha - gamma|| computed directly
  Rational dist_from_S;       // min(|S|, 1 - |S|)
  Rational residual;          // from encoding gamma
  int bound_B = 0;
  bool lemma_equality = false;   // |dist - dist_from_S| <= |residual|
  bool sign_claim = false;       // |S| = sgn(delta_{m+1} D_m) S
  bool corollary_bound = false;  // dist <= 4B/q_m (+ |residual|)
  bool degenerate = false;       // n alpha - gamma is an integer
};

// D_0 .. D_{J-1} for the word's exact value.
std::vector<Rational> error_terms(const CFWord& word);

bool digits_legal(const CFWord& word, std::span<const int> b,
                  LeadingDigit lead = LeadingDigit::AllowZero);

IntegerOstrowski encode_int(const BigInt& n, const CFWord& word);

// Greedy digits of n < q[q.size()-1] in the base q_0 .. q_{J-1}; fast path
// for small denominators. Returns c_1 .. c_J.
std::vector<int> encode_int_small(std::uint64_t n, std::span<const std::uint64_t> q);

OstrowskiDigits encode_real(const Rational& gamma, const CFWord& word,
                            LeadingDigit lead = LeadingDigit::AllowZero);

Rational decode(const OstrowskiDigits& digits);
BigInt decode(const IntegerOstrowski& digits);

// Decode b_1..b_len over the first len error terms.
Rational decode_digits(std::span<const int> b, std::span<const Rational> errors);

// Throws DepthError unless q_{J-1} >= 10/tau and q_{J-1} >= 10 n.
void require_depth(const ConvergentTable& table, const BigInt& n, const Rational& tau);

NagReport nag_evaluate(const BigInt& n, const CFWord& word, const Rational& gamma,
                       std::optional<Rational> tau = std::nullopt);

}  // namespace badapprox::ostrowski
