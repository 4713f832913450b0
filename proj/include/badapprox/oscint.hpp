#pragma once

// Oscillatory integrals of e(F) = exp(2 pi i F) for polynomial phases, and
// bound checks for the non-stationary phase, van der Corput and ExpInt
// lemmas with explicit constants.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "badapprox/rng.hpp"

namespace badapprox::oscint {

// c[0] + c[1] t + c[2] t^2 + ...
struct Poly {
  std::vector<double> c;

  double operator()(double t) const;
  Poly derivative() const;
  Poly antiderivative() const;  // zero constant term
  int degree() const { return static_cast<int>(c.size()) - 1; }
};

// Real roots in [lo, hi], isolated through the roots of the derivative.
std::vector<double> real_roots(const Poly& p, double lo, double hi);

// min and max of |p| over [lo, hi]: endpoints, critical points and a grid.
struct AbsRange {
  double min = 0, max = 0;
};
AbsRange abs_range(const Poly& p, double lo, double hi, int grid = 10'000);

struct QuadResult {
  std::complex<double> value;
  double error = 0;  // sum of per-panel |K15 - G7|
  std::size_t panels = 0;
};

inline constexpr std::size_t kPanelCap = 4'000'000;

// int_X^Y e(F(t)) dt. Panels are halved until F varies by < 1/4 cycle on
// each, then refined adaptively with Gauss-Kronrod 7-15 until the summed
// error estimate is <= tol. Throws GuardError at the panel cap.
QuadResult quad_oscillatory(const std::function<double(double)>& F, double X, double Y, double tol);
QuadResult quad_oscillatory(const Poly& F, double X, double Y, double tol);

struct HalvingCheck {
  QuadResult coarse, fine;  // at tol and tol / 2
  double change = 0;
  bool consistent = false;  // change <= coarse.error
};

HalvingCheck halving_check(const Poly& F, double X, double Y, double tol);

enum class LemmaId { NonStationary, VanDerCorput, ExpInt };

std::string lemma_name(LemmaId id);

struct PhaseSpec {
  LemmaId lemma = LemmaId::NonStationary;
  Poly F;              // the phase; built from A, B, G for ExpInt
  double X = 0, Y = 1;  // integration interval
  double a = 0, b = 0;
  double lambda = 0;   // van der Corput
  int k = 1;
  double A = 0, B = 0;  // ExpInt: f' = (A t + B) G
  int m = 1;
  Poly G;

  // Phase with f' = (A t + B) G and f(0) = 0.
  static PhaseSpec exp_int(double A, double B, const Poly& G, double a, double b, int m, double X, double Y);
  std::string describe() const;
};

struct HypothesisReport {
  bool ok = false;
  std::string reason;
};

// NonStationary: |F'| >= a, |F''| <= b on [-1,1], [X,Y] inside [-1,1].
// VanDerCorput: |F^(k)| >= lambda on (X,Y); F' monotone there when k = 1.
// ExpInt: |G| >= a, |G'| <= b on [0,1], 0 <= a <= m b, A != 0,
//   f'' with at most m zeros in [0,1], 0 <= X <= Y <= 1.
HypothesisReport check_hypothesis(const PhaseSpec& spec);

struct OscIntReport {
  LemmaId lemma = LemmaId::NonStationary;
  std::string params;
  double bound = 0;
  double observed = 0;  // |integral|
  double quad_error = 0;
  double ratio = 0;     // observed / bound
  bool trivial = false; // ExpInt outside the small-rhs regime: bound 1
  bool holds = false;   // observed <= bound
};

// Explicit constants:
//   NonStationary  (1/pi)(1/a + b/a^2)
//   VanDerCorput   10 k lambda^{-1/k}
//   ExpInt         10 m b / (a^{3/2} |A|^{1/2}), or 1 when b/(|A|^{1/2} a^{3/2}) >= 1/m
// Throws std::invalid_argument("inadmissible instance: ...") when the hypothesis fails.
OscIntReport check_lemma_bounds(const PhaseSpec& spec, double tol = 1e-9);

// Random admissible instance; deterministic in the generator state.
PhaseSpec random_instance(LemmaId lemma, CounterRng& rng);

struct SweepReport {
  LemmaId lemma = LemmaId::NonStationary;
  std::size_t instances = 0;
  std::size_t violations = 0;
  std::size_t trivial = 0;
  double max_ratio = 0;
  std::vector<OscIntReport> reports;
};

// Instance i draws from stream i of `seed`.
SweepReport sweep(LemmaId lemma, std::size_t n, std::uint64_t seed, int threads, double tol = 1e-9);

}  // namespace badapprox::oscint
