#pragma once

// Block measure lambda_m on pairs (a, b) with b in V_m(a), its conditioned
// version on the event E, the product measure nu, cylinder weights, sampling
// and the Fourier / ball-mass estimators built on it.

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "badapprox/numeric.hpp"
#include "badapprox/rng.hpp"

namespace badapprox::kaufman {

inline constexpr double kEnumerationGuard = 1e7;
inline constexpr std::uint64_t kRejectionCap = 1'000'000;

struct MeasureParams {
  int M = 2;
  int R = 3;
  int m = 3;
  double kappa = 1.0;
  double epsilon = 0.2;
  int j0 = 1;
  std::uint64_t seed = 0;
  bool conditioning = true;

  void validate() const;
};

// Every a in [M]^m with q_m(a), plus the words with v_m(a) > 0 stored
// individually in decreasing-q order.
class BlockTable {
 public:
  BlockTable(int M, int R, int m);

  int M() const { return M_; }
  int R() const { return R_; }
  int m() const { return m_; }

  std::size_t size() const { return q_.size(); }
  std::span<const std::uint8_t> word(std::size_t i) const {
    return {digits_.data() + i * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
  }
  std::uint64_t q(std::size_t i) const { return q_[i]; }
  std::uint64_t v(std::size_t i) const { return v_[i]; }

  // (q, multiplicity) over all of [M]^m, decreasing q.
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& all_q() const { return all_q_; }
  // (q, sum of v) over words with v > 0, decreasing q.
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& weighted_q() const { return weighted_q_; }

  std::optional<std::size_t> find(std::span<const int> a) const;

 private:

  int M_, R_, m_;
  std::vector<std::uint8_t> digits_;
  std::vector<std::uint64_t> q_, v_;
  std::vector<std::uint64_t> codes_;  // sorted word codes, for find()
  std::vector<std::uint32_t> code_index_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> all_q_, weighted_q_;
};

std::shared_ptr<const BlockTable> block_table(int M, int R, int m);

double eval_T(const BlockTable& table, double kappa);
double eval_omega_sum(const BlockTable& table, double omega);
double sigma_m(const BlockTable& table, double kappa);

struct ExponentReport {
  int M = 0, R = 0, m = 0;
  double kappa = 0;  // the kappa at which T_m and sigma_m are reported
  double T_m = 0;
  double sigma_m = 0;
  double kappa_star = 0;
  double omega = 0;
  double kappa_residual = 0;  // T_m(kappa_star) - 1
  double omega_residual = 0;
};

double solve_kappa(const BlockTable& table);
double solve_omega(const BlockTable& table);
ExponentReport exponents(const BlockTable& table, std::optional<double> kappa = std::nullopt);

struct Conformance {
  std::vector<std::pair<std::string, bool>> items;

  bool get(const std::string& name) const;
  void set(const std::string& name, bool value);
};

struct CylinderId {
  std::vector<int> a;
  std::vector<int> b;
};

struct SamplePoint {
  Rational alpha;
  Rational gamma;
  CylinderId words;
  int J = 0;
  BigInt q_J, q_Jm1;
  BigInt n_b;             // sum b_{k+1} q_k
  double res_alpha = 0;   // cylinder half-width bound in alpha
  double res_gamma = 0;   // bound on |gamma' - gamma| within the cylinder
  std::uint64_t attempts = 0;  // j0-block draws including rejections
  int groups = 0;              // accepted j0-blocks
};

struct CylinderReport {
  double measure = 0;       // nu(C)
  double log_measure = 0;
  double lower = 0, upper = 0;
  bool in_E = false;
  bool sandwich = false;
  double log_q = 0;         // log q_J of the a-word
  double log_Q = 0;         // J sigma_m
  bool q_sandwich = false;  // Q^{1-2e} <= q_J <= Q^{1+2e}
  bool q_prev_bound = false;  // q_{J-1} >= Q^{1-2e} / (2M)
};

class Measure {
 public:
  Measure(const MeasureParams& params, std::shared_ptr<const BlockTable> table = nullptr);

  const MeasureParams& params() const { return params_; }
  const BlockTable& table() const { return *table_; }
  double T() const { return T_; }
  double sigma() const { return sigma_; }
  double kappa_star() const { return kappa_star_; }
  double prob_E() const { return prob_E_; }
  bool prob_E_exact() const { return prob_E_exact_; }
  double c_lambda() const { return params_.conditioning ? 1.0 / prob_E_ : 1.0; }

  // lambda_m(a, b) for the block with table index i.
  double block_weight(std::size_t i) const { return weight_[i]; }
  // log q_m of block i.
  double block_log_q(std::size_t i) const { return log_q_[i]; }
  // Whether j0 blocks with these log q_m values satisfy the E inequality.
  bool in_E(std::span<const double> log_qs) const;

  Conformance conformance() const;

  // Draw one block: table index and digits b.
  std::size_t draw_block(CounterRng& rng, std::vector<int>& b) const;

  // Sample N j0-blocks on stream `stream`, then keep appending j0-blocks
  // until both residuals are below `precision` (if given).
  SamplePoint sample_point(std::uint64_t stream, int N, std::optional<double> precision = std::nullopt,
                           int max_N = 200) const;

  // Sample whole j0-blocks on `stream` until q_{J-1} >= min_qJm1. Same prefix
  // as sample_point on the same stream.
  SamplePoint sample_to_depth(std::uint64_t stream, const BigInt& min_qJm1, int max_groups = 4000) const;

  CylinderReport cylinder_measure(const CylinderId& id) const;

  // Every (a, b) pair over N j0-blocks with nonzero measure.
  std::vector<CylinderId> all_cylinders(int N, std::size_t guard = 1'000'000) const;

 private:
  SamplePoint sample_until(std::uint64_t stream,
                           const std::function<bool(const SamplePoint&, const BigInt&)>& stop) const;
  void compute_prob_E();
  std::vector<int> draw_b(std::size_t i, CounterRng& rng) const;

  MeasureParams params_;
  std::shared_ptr<const BlockTable> table_;
  double T_ = 0, sigma_ = 0, kappa_star_ = 0;
  double prob_E_ = 1;
  bool prob_E_exact_ = true;
  std::vector<double> weight_, log_q_;
  std::vector<double> alias_prob_;
  std::vector<std::uint32_t> alias_;
};

struct FourierEstimate {
  long k1 = 0, k2 = 0;
  std::complex<double> value;
  double stderr_ = 0;
  std::size_t S = 0;
};

struct FourierRun {
  std::vector<FourierEstimate> estimates;
  double precision = 0;  // residual target used for sample depth
  double mean_depth = 0;
  int max_depth = 0;
  double acceptance_rate = 1;
};

// One shared sample set of size S for all frequencies; sample i uses stream i.
FourierRun fourier_estimate(const Measure& mu, const std::vector<std::pair<long, long>>& ks, std::size_t S,
                            int threads);

struct BallMassProfile {
  std::vector<double> radii;
  std::vector<double> max_mass;  // max over probe centres of the fraction within r
  double slope = 0;              // least-squares slope of log mass vs log r
};

// Ball masses of an empirical point set: probes are points[0 .. n_probes).
BallMassProfile ball_mass_profile(const std::vector<std::pair<double, double>>& points,
                                  const std::vector<double>& radii, std::size_t n_probes, int threads);

struct FrostmanReport {
  BallMassProfile profile;
  double theoretical_exponent = 0;  // 2 kappa - 2 - 4 (2 - kappa) epsilon
  double envelope_c = 0;            // fitted at the largest radius
  bool envelope_holds = false;      // mass <= c r^s + 3 stderr across the grid
  std::size_t S = 0;
};

FrostmanReport frostman_scan(const Measure& mu, std::size_t S, const std::vector<double>& radii,
                             std::size_t n_probes, int threads);

}  // namespace badapprox::kaufman
