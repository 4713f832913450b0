#include "badapprox/symbolic.hpp"

#include <stdexcept>
#include <string>

#include "badapprox/ostrowski.hpp"

namespace badapprox::symbolic {

void DigitSpaceParams::validate() const {
  if (M < 2) throw std::invalid_argument("digit space: M must be >= 2");
  if (R < 3) throw std::invalid_argument("digit space: R must be >= 3");
}

bool DigitCountTable::hypothesis(std::size_t k) const {
  for (std::size_t r = 1; r <= k; ++r)
    if (is_constrained(r, R) && word.quotient(r) < 2) return false;
  return true;
}

bool DigitCountTable::sandwich_holds() const {
  const contfrac::ConvergentTable t(word);
  for (std::size_t k = 1; k <= v.size(); ++k) {
    if (!hypothesis(k)) continue;
    const BigInt& q = t.den(static_cast<int>(k));
    const BigInt& vk = v[k - 1];
    if (vk > q) return false;
    if (q > pow_big(3, static_cast<unsigned long>(n_counts[k - 1])) * vk) return false;
  }
  return true;
}

DigitCountTable count_V(const CFWord& word, int R) {
  if (R < 3) throw std::invalid_argument("count_V: R must be >= 3");
  const std::size_t m = word.length();
  DigitCountTable out{word, R, std::vector<BigInt>(m), std::vector<int>(m)};
  auto a = [&](std::size_t k) { return word.quotient(k); };
  out.v[0] = a(1) - 1;
  if (m >= 2) out.v[1] = a(2) * BigInt(a(1) - 1);
  for (std::size_t k = 3; k <= m; ++k) {
    const std::size_t r = k % static_cast<std::size_t>(R);
    if (r == 0 || r == 1) {
      out.v[k - 1] = (a(k) - 1) * out.v[k - 2];
    } else if (r == 2) {
      out.v[k - 1] = a(k) * out.v[k - 2];
    } else {
      out.v[k - 1] = a(k) * out.v[k - 2] + out.v[k - 3];
    }
  }
  int n = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (k % static_cast<std::size_t>(R) <= 2) ++n;
    out.n_counts[k - 1] = n;
  }
  return out;
}

std::vector<std::vector<int>> enumerate_V(const CFWord& word, int R, std::uint64_t guard) {
  if (R < 3) throw std::invalid_argument("enumerate_V: R must be >= 3");
  const BigInt v = count_V(word, R).v.back();
  if (v > guard)
    throw GuardError("enumerate_V: |V_m| = " + to_string(v) + " exceeds guard " + std::to_string(guard));
  std::vector<std::vector<int>> out;
  out.reserve(v.get_ui());
  for_each_V(word.quotients(), R, [&](const std::vector<int>& b) { out.push_back(b); });
  return out;
}

bool check_membership(const CFWord& word, const std::vector<int>& b, const DigitSpaceParams& params) {
  if (b.size() != word.length()) return false;
  for (int a : word.quotients())
    if (a > params.M) return false;
  if (!ostrowski::digits_legal(word, b)) return false;
  for (std::size_t k = 1; k <= b.size(); ++k) {
    if (!is_constrained(k, params.R)) continue;
    if (b[k - 1] < 1 || b[k - 1] > word.quotient(k) - 1) return false;
  }
  return true;
}

std::pair<CFWord, std::vector<int>> shift_R(const CFWord& word, const std::vector<int>& b, int R) {
  const std::size_t J = word.length();
  const auto uR = static_cast<std::size_t>(R);
  if (R < 3) throw std::invalid_argument("shift_R: R must be >= 3");
  if (J < 2 * uR || J % uR != 0)
    throw std::invalid_argument("shift_R: length must be a multiple of R and at least 2R");
  const DigitSpaceParams params{word.effective_cap() < 2 ? 2 : word.effective_cap(), R};
  if (!check_membership(word, b, params))
    throw std::invalid_argument("shift_R: input violates the periodic constraint");
  std::vector<int> b2(b.begin() + static_cast<long>(uR), b.end());
  return {word.suffix_from(uR), std::move(b2)};
}

}  // namespace badapprox::symbolic
