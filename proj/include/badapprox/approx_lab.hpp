#pragma once

// Lacunary hit counting against 2 Psi(N), the window functions W^+- with
// their Fourier coefficients, and the multiplicative (Littlewood-type)
// counting experiment.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "badapprox/contfrac.hpp"
#include "badapprox/kaufman.hpp"
#include "badapprox/numeric.hpp"

namespace badapprox::approx_lab {

using contfrac::CFWord;
using kaufman::SamplePoint;

// Sample depth needed per unit of n: q_{J-1} >= kDepthFactor * n.
inline constexpr long kDepthFactor = 10'000;

// ---------------------------------------------------------------- lacunary

enum class PsiFamily { Constant, Harmonic, Power, LogInverse, Table };

// psi as a function of (t, n_t):
//   const:c        c
//   harmonic:c     c / t
//   power:c,p      c t^-p
//   log8           1 / (8 log n), 0 at n = 1
//   table:v1,v2..  v_t
struct PsiSpec {
  PsiFamily family = PsiFamily::Constant;
  double c = 0.5;
  double p = 1.0;
  std::vector<double> table;

  double value(long t, const BigInt& n) const;
  static PsiSpec parse(std::string_view text);
  std::string describe() const;
};

// Explicit terms, or n_t = ceil(n_1 rho^(t-1)) with repeats dropped.
struct SequenceSpec {
  std::vector<BigInt> explicit_terms;
  BigInt n1 = 2;
  Rational rho = 2;

  std::vector<BigInt> terms(int N) const;
  static SequenceSpec parse(std::string_view text);  // "geom:n1,rho" or "list:a,b,c"
  std::string describe() const;
};

struct LacunaryConfig {
  SequenceSpec sequence;
  PsiSpec psi;
  int N = 500;

  void validate() const;
};

// Sequence terms and psi values for t = 1..N, computed once.
struct LacunaryPlan {
  std::vector<BigInt> n;
  std::vector<double> psi;
  std::vector<Rational> psi_exact;  // exact value of each double
  std::vector<double> Psi;          // prefix sums, Psi[t-1] = Psi(t)
  double min_ratio = 0;             // min n_{t+1} / n_t

  int N() const { return static_cast<int>(n.size()); }
};

LacunaryPlan make_plan(const LacunaryConfig& config);

struct CountReport {
  int N = 0;
  long count = 0;
  double Psi = 0;
  double ratio = 0;          // count / (2 Psi), 0 when Psi = 0
  long boundary_flags = 0;   // hits and misses within the truncation residual of psi
  long count_modular = 0;    // second exact path
  bool paths_agree = false;
  std::vector<int> hits;     // t values, increasing

  long count_upto(int t) const;
};

// Depth the sample needs for this plan: kDepthFactor * n_N.
BigInt required_depth(const LacunaryPlan& plan);

// Throws DepthError when the sample's q_{J-1} is below required_depth.
CountReport count_hits(const SamplePoint& sample, const LacunaryPlan& plan);
CountReport count_hits(const SamplePoint& sample, const LacunaryConfig& config);

// Sample on `stream`, extended until the depth guard of the plan holds.
SamplePoint lacunary_sample(const kaufman::Measure& mu, std::uint64_t stream, const LacunaryPlan& plan);

struct AsymptoticRow {
  CountReport report;
  bool excluded = false;        // degenerate: depth guard failed
  double normalized_error = 0;  // |N - 2 Psi| / (Psi^(2/3) log(2 + Psi)^3)
};

struct AsymptoticSummary {
  std::vector<AsymptoticRow> rows;
  double Psi = 0;
  bool psi_sufficient = false;  // Psi(N) >= 4
  long excluded = 0;
  double median_ratio = 0;
  double band = 0.35;
  double fraction_in_band = 0;  // |ratio - 1| <= band among included rows
  double max_normalized_error = 0;
};

AsymptoticSummary asymptotic_check(const std::vector<SamplePoint>& samples, const LacunaryConfig& config,
                                   double band = 0.35, int threads = 1);

// ---------------------------------------------------------------- windows

enum class WindowSign { Plus, Minus };

struct WindowSpec {
  long q = 5;
  double epsilon = 1.0;
  double psi_q = 0.1;
  WindowSign sign = WindowSign::Plus;

  void validate() const;
  double delta() const { return psi_q / static_cast<double>(q); }
};

// chi^+-_{delta, eps}(x), delta = psi_q / q.
double chi(const WindowSpec& spec, double x);
// W^+-_{q, eps}(alpha, gamma), summed term by term over p = 0..q-1.
double window_value(const WindowSpec& spec, double alpha, double gamma);

// Closed form of the (k1, k2) Fourier coefficient.
std::complex<double> window_coeff(const WindowSpec& spec, long k1, long k2);

struct QuadratureResult {
  std::complex<double> value;
  double error = 0;
  int refinements = 0;
};

// Direct 2D integration of W e(-k1 alpha - k2 gamma) over [0,1)^2: Gauss-Legendre
// panels between the kinks in alpha, composite Gauss-Legendre in gamma,
// refined until two successive levels agree to `tol`.
QuadratureResult window_coeff_quadrature(const WindowSpec& spec, long k1, long k2, double tol = 1e-9);

struct CoeffBoundReport {
  long s_max = 0;
  double partial_sum = 0;       // sum over |s| <= s_max of |W^(sq, -s)|
  double sum_bound = 0;         // 12 / sqrt(eps)
  bool sum_ok = false;
  double max_pointwise_ratio = 0;  // max |W^(qs, -s)| / min((2+eps) psi, 1/(pi^2 s^2 psi eps))
  bool pointwise_ok = false;
  bool zero_term_exact = false;    // W^(0,0) == (2 +- eps) psi
};

CoeffBoundReport coeff_bound_check(const WindowSpec& spec, long s_max = 1000);

// Monte Carlo sandwich: int W^- dnu <= nu(E) <= int W^+ dnu with
// E = {||q alpha - gamma|| <= psi}.
struct MuIneqReport {
  double lower = 0, lower_stderr = 0;
  double freq = 0, freq_stderr = 0;
  double upper = 0, upper_stderr = 0;
  bool holds = false;  // within 4 stderr on each side
  std::size_t S = 0;
};

MuIneqReport muineq_check(const kaufman::Measure& mu, long q, double psi_q, double epsilon, std::size_t S,
                          int threads);

// ---------------------------------------------------------- multiplicative

struct MultConfig {
  CFWord alpha;
  Rational gamma = 0;

  // C = max over available k of log q_k / k.
  double C() const;
};

struct MultTerm {
  int t = 0;
  int cutoff = 0;        // k_t
  BigInt n;              // sum_{i < k_t} b_{i+1} q_i + q_{k_t}
  Rational dist;         // ||n alpha - gamma|| for the word's value
  Rational residual;     // n / q_J^2, tail allowance
  bool rate_ok = false;       // dist + residual <= 8 / n
  bool lower_ok = false;      // 8^t < n
  bool upper_ok = false;      // n <= 4 e^{6 C t}
};

struct MultSequence {
  CFWord word;
  Rational gamma;
  double C = 0;
  int stride = 0;
  std::vector<MultTerm> terms;
  bool certified = false;
};

// Smallest uniform stride s with cutoffs k_t = s t for which every
// certificate holds up to the usable depth. Throws DepthError if none does.
MultSequence build_mult_sequence(const MultConfig& config);

// Recomputes every certificate from integer residues mod the common denominator.
bool verify_mult_certificates(const MultSequence& seq);

struct MultCount {
  long N = 0;
  long count = 0;      // decided hits
  long ambiguous = 0;  // comparisons inside the enclosure, not in count
  std::vector<long> hits;
  std::vector<long> ambiguous_n;

  long count_upto(long h) const;
};

// Number of 2 <= n <= N with ||n alpha - gamma|| ||n beta - delta|| <= 1/(n log n),
// (beta, delta) from the sample. Both depth guards need q_{J-1} >= kDepthFactor N.
MultCount count_mult_hits(const CFWord& alpha, const Rational& gamma, const SamplePoint& sample, long N);

}  // namespace badapprox::approx_lab
