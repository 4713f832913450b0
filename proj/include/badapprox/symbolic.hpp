#pragma once

// The constrained digit sets V_k(a): legal Ostrowski digits b with the extra
// periodic rule 1 <= b_k <= a_k - 1 whenever k mod R is 0 or 1.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "badapprox/contfrac.hpp"

namespace badapprox::symbolic {

using contfrac::CFWord;

struct DigitSpaceParams {
  int M = 2;
  int R = 3;

  void validate() const;
};

inline bool is_constrained(std::size_t k, int R) {
  const auto r = k % static_cast<std::size_t>(R);
  return r == 0 || r == 1;
}

struct DigitCountTable {
  CFWord word;
  int R = 3;
  std::vector<BigInt> v;     // v_1 .. v_m
  std::vector<int> n_counts; // n_1 .. n_m

  // a_r >= 2 at every constrained r <= k.
  bool hypothesis(std::size_t k) const;
  // v_k <= q_k <= 3^{n_k} v_k for every k where the hypothesis holds.
  bool sandwich_holds() const;
};

DigitCountTable count_V(const CFWord& word, int R);

// Depth-first walk over V_m(a) straight from the digit rules, in
// lexicographic order. visit receives the full digit word b_1..b_m.
template <class Visit>
void for_each_V(const std::vector<int>& a, int R, Visit&& visit) {
  const std::size_t m = a.size();
  if (m == 0) return;
  std::vector<int> b(m, 0);
  std::size_t k = 0;
  // lo/hi of the digit at position k+1 given b_k.
  auto range = [&](std::size_t i) {
    const int ak = a[i];
    int lo = 0, hi = ak;
    if (i == 0 || b[i - 1] != 0) hi = ak - 1;
    if (is_constrained(i + 1, R)) {
      lo = 1;
      hi = std::min(hi, ak - 1);
    }
    return std::pair<int, int>{lo, hi};
  };
  std::vector<int> top(m, 0);
  {
    auto [lo, hi] = range(0);
    if (lo > hi) return;
    b[0] = lo;
    top[0] = hi;
  }
  while (true) {
    if (k + 1 == m) {
      visit(static_cast<const std::vector<int>&>(b));
    } else {
      auto [lo, hi] = range(k + 1);
      if (lo <= hi) {
        ++k;
        b[k] = lo;
        top[k] = hi;
        continue;
      }
    }
    // advance to the next sibling, backtracking as needed
    while (b[k] == top[k]) {
      if (k == 0) return;
      --k;
    }
    ++b[k];
  }
}

inline constexpr std::uint64_t kEnumerateGuard = 1'000'000;

std::vector<std::vector<int>> enumerate_V(const CFWord& word, int R,
                                          std::uint64_t guard = kEnumerateGuard);

bool check_membership(const CFWord& word, const std::vector<int>& b, const DigitSpaceParams& params);

std::pair<CFWord, std::vector<int>> shift_R(const CFWord& word, const std::vector<int>& b, int R);

}  // namespace badapprox::symbolic
