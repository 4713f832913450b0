#include "badapprox/ostrowski.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace badapprox::ostrowski {

std::vector<Rational> error_terms(const CFWord& word) {
  ConvergentTable t(word);
  const int J = t.depth();
  const Rational alpha = t.value();
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(J));
  for (int k = 0; k < J; ++k) out.push_back(Rational(t.den(k)) * alpha - Rational(t.num(k)));
  return out;
}

bool digits_legal(const CFWord& word, std::span<const int> b, LeadingDigit lead) {
  if (b.size() > word.length()) return false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const int a = word.quotient(i + 1);
    if (b[i] < 0 || b[i] > a) return false;
    if (i == 0) {
      if (b[0] > a - 1) return false;
      if (lead == LeadingDigit::Positive && b[0] < 1) return false;
    } else if (b[i] == a && b[i - 1] != 0) {
      return false;
    }
  }
  return true;
}

std::vector<int> encode_int_small(std::uint64_t n, std::span<const std::uint64_t> q) {
  const std::size_t J = q.size() - 1;
  if (n >= q[J]) throw DepthError("encode_int: n >= q_J, word too short");
  std::vector<int> c(J, 0);
  for (std::size_t k = J; k-- > 0;) {
    c[k] = static_cast<int>(n / q[k]);
    n -= static_cast<std::uint64_t>(c[k]) * q[k];
  }
  return c;
}

IntegerOstrowski encode_int(const BigInt& n, const CFWord& word) {
  if (n < 1) throw std::domain_error("encode_int: n must be >= 1");
  ConvergentTable t(word);
  const int J = t.depth();
  if (n >= t.den(J)) throw DepthError("encode_int: n >= q_J, word too short");
  std::vector<int> c(static_cast<std::size_t>(J), 0);
  if (t.den(J).fits_ulong_p()) {
    std::vector<std::uint64_t> q(static_cast<std::size_t>(J) + 1);
    for (int k = 0; k <= J; ++k) q[static_cast<std::size_t>(k)] = t.den(k).get_ui();
    c = encode_int_small(n.get_ui(), q);
  } else {
    BigInt rest = n, digit;
    for (int k = J - 1; k >= 0; --k) {
      mpz_fdiv_qr(digit.get_mpz_t(), rest.get_mpz_t(), rest.get_mpz_t(), t.den(k).get_mpz_t());
      c[static_cast<std::size_t>(k)] = static_cast<int>(digit.get_si());
    }
  }
  int K = J - 1;
  while (K > 0 && c[static_cast<std::size_t>(K)] == 0) --K;
  c.resize(static_cast<std::size_t>(K) + 1);
  return IntegerOstrowski{word, std::move(c), n, K};
}

namespace {

// Exact hull [lo, hi] of s_k * sum_{j>=k} b_{j+1} D_j over legal tails, for
// each k and each state of the previous digit (0: zero, 1: nonzero).
struct TailHull {
  std::vector<std::array<Rational, 2>> lo, hi;
};

TailHull tail_hulls(const CFWord& word, const std::vector<Rational>& absD) {
  const std::size_t J = word.length();
  TailHull h;
  h.lo.resize(J + 1);
  h.hi.resize(J + 1);
  h.lo[J] = {Rational(0), Rational(0)};
  h.hi[J] = {Rational(0), Rational(0)};
  for (std::size_t k = J; k-- > 0;) {
    const int a = word.quotient(k + 1);
    for (int st = 0; st < 2; ++st) {
      // d = 0 keeps the next state free; d >= 1 restricts it.
      Rational lo = -h.hi[k + 1][0];
      Rational hi = -h.lo[k + 1][0];
      const int top = a - st;
      if (top >= 1) {
        lo = std::min(lo, Rational(absD[k] - h.hi[k + 1][1]));
        hi = std::max(hi, Rational(top * absD[k] - h.lo[k + 1][1]));
      }
      h.lo[k][static_cast<std::size_t>(st)] = lo;
      h.hi[k][static_cast<std::size_t>(st)] = hi;
    }
  }
  return h;
}

}  // namespace

OstrowskiDigits encode_real(const Rational& gamma, const CFWord& word, LeadingDigit lead) {
  const auto D = error_terms(word);
  const Rational& alpha = D[0];
  if (gamma < -alpha || gamma >= 1 - alpha)
    throw std::domain_error("encode_real: gamma must lie in [-alpha, 1-alpha)");
  const std::size_t J = word.length();
  std::vector<Rational> absD(J);
  for (std::size_t k = 0; k < J; ++k) absD[k] = abs(D[k]);
  const TailHull hull = tail_hulls(word, absD);

  std::vector<int> b(J, 0);
  Rational rho = gamma, x, y, gap, best_gap;
  int st = 1;  // virtual b_0 counts as nonzero, capping b_1 at a_1 - 1
  for (std::size_t k = 0; k < J; ++k) {
    x = (k % 2 == 0) ? rho : Rational(-rho);
    int best = -1;
    const int top = word.quotient(k + 1) - st;
    for (int d = 0; d <= top; ++d) {
      const std::size_t ns = d > 0 ? 1 : 0;
      y = d * absD[k] - x;
      gap = 0;
      if (y < hull.lo[k + 1][ns]) gap = hull.lo[k + 1][ns] - y;
      else if (y > hull.hi[k + 1][ns]) gap = y - hull.hi[k + 1][ns];
      if (best < 0 || gap < best_gap) {
        best = d;
        best_gap = gap;
        if (sgn(gap) == 0) break;
      }
    }
    b[k] = best;
    if (best != 0) rho -= best * D[k];
    st = best > 0 ? 1 : 0;
  }
  if (lead == LeadingDigit::Positive && b[0] < 1)
    throw std::domain_error("encode_real: leading digit is 0 but a positive digit was required");
  return OstrowskiDigits{word, std::move(b), rho};
}

Rational decode_digits(std::span<const int> b, std::span<const Rational> errors) {
  if (b.size() > errors.size()) throw std::invalid_argument("decode: more digits than error terms");
  Rational s = 0;
  for (std::size_t k = 0; k < b.size(); ++k)
    if (b[k] != 0) s += b[k] * errors[k];
  return s;
}

Rational decode(const OstrowskiDigits& digits) {
  if (!digits_legal(digits.word, digits.b)) throw std::invalid_argument("decode: illegal digit pattern");
  return decode_digits(digits.b, error_terms(digits.word));
}

BigInt decode(const IntegerOstrowski& digits) {
  if (!digits_legal(digits.word, digits.c)) throw std::invalid_argument("decode: illegal digit pattern");
  ConvergentTable t(digits.word);
  BigInt n = 0;
  for (std::size_t k = 0; k < digits.c.size(); ++k) n += digits.c[k] * t.den(static_cast<int>(k));
  return n;
}

void require_depth(const ConvergentTable& table, const BigInt& n, const Rational& tau) {
  if (sgn(tau) <= 0) throw std::invalid_argument("require_depth: tau must be positive");
  const BigInt& q = table.den(table.depth() - 1);
  if (Rational(q) * tau < 10)
    throw DepthError("depth guard: q_{J-1} = " + to_string(q) + " < 10/tau");
  if (q < 10 * n) throw DepthError("depth guard: q_{J-1} = " + to_string(q) + " < 10 n");
}

NagReport nag_evaluate(const BigInt& n, const CFWord& word, const Rational& gamma,
                       std::optional<Rational> tau) {
  const ConvergentTable t(word);
  const int J = t.depth();
  if (J < 3) throw DepthError("nag_evaluate: word length must be at least 3");
  if (n >= t.den(J - 2)) throw DepthError("nag_evaluate: n must be below q_{J-2}");
  if (tau) require_depth(t, n, *tau);

  const auto D = error_terms(word);
  const OstrowskiDigits gb = encode_real(gamma, word);
  std::vector<int> c(static_cast<std::size_t>(J), 0);
  if (n >= 1) {
    const auto ic = encode_int(n, word);
    std::copy(ic.c.begin(), ic.c.end(), c.begin());
  }

  NagReport rep;
  rep.residual = gb.residual;
  rep.delta.resize(static_cast<std::size_t>(J));
  rep.m = J;
  for (int k = 0; k < J; ++k) {
    const int d = c[static_cast<std::size_t>(k)] - gb.b[static_cast<std::size_t>(k)];
    rep.delta[static_cast<std::size_t>(k)] = d;
    rep.bound_B = std::max(rep.bound_B, std::abs(d));
    if (d != 0 && rep.m == J) rep.m = k;
  }
  rep.S = decode_digits(rep.delta, D);

  const Rational diff = Rational(n) * t.value() - gamma;
  rep.degenerate = diff.get_den() == 1;
  rep.dist = dist_to_int(diff);
  const Rational absS = abs(rep.S);
  rep.dist_from_S = std::min(absS, Rational(1 - absS));
  rep.lemma_equality = abs(rep.dist - rep.dist_from_S) <= abs(rep.residual);

  if (rep.m == J) {
    rep.sign_claim = sgn(rep.S) == 0;
    rep.corollary_bound = rep.dist <= abs(rep.residual);
  } else {
    const int s = (rep.delta[static_cast<std::size_t>(rep.m)] > 0 ? 1 : -1) * sgn(D[static_cast<std::size_t>(rep.m)]);
    rep.sign_claim = (s * rep.S) == absS;
    const Rational bound(4 * rep.bound_B, t.den(rep.m));
    rep.corollary_bound = rep.dist_from_S <= bound && rep.dist <= bound + abs(rep.residual);
  }
  return rep;
}

}  // namespace badapprox::ostrowski
