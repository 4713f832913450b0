#include "badapprox/kaufman.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "badapprox/contfrac.hpp"
#include "badapprox/parallel.hpp"
#include "badapprox/symbolic.hpp"

namespace badapprox::kaufman {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Kahan {
  double sum = 0, c = 0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

double pow_guard(int M, int m) { return std::pow(static_cast<double>(M), m); }

}  // namespace

void MeasureParams::validate() const {
  if (M < 2) throw std::invalid_argument("params: M must be >= 2");
  if (R < 3) throw std::invalid_argument("params: R must be >= 3");
  if (m < 1 || m % R != 0) throw std::invalid_argument("params: m must be a positive multiple of R");
  if (!(kappa > 0.5)) throw std::invalid_argument("params: kappa must exceed 1/2");
  if (!(epsilon > 0 && epsilon < 0.25)) throw std::invalid_argument("params: epsilon must lie in (0, 1/4)");
  if (j0 < 1) throw std::invalid_argument("params: j0 must be >= 1");
  if (pow_guard(M, m) > kEnumerationGuard)
    throw GuardError("feasibility guard: M^m exceeds 1e7");
}

BlockTable::BlockTable(int M, int R, int m) : M_(M), R_(R), m_(m) {
  if (M < 2 || M > 255) throw std::invalid_argument("block table: M must lie in [2, 255]");
  if (R < 3) throw std::invalid_argument("block table: R must be >= 3");
  if (m < 1) throw std::invalid_argument("block table: m must be >= 1");
  if (pow_guard(M, m) > kEnumerationGuard) throw GuardError("feasibility guard: M^m exceeds 1e7");

  const auto um = static_cast<std::size_t>(m);
  std::vector<int> a(um, 1);
  std::vector<std::uint64_t> all;
  all.reserve(static_cast<std::size_t>(pow_guard(M, m)));
  struct Entry {
    std::uint64_t q, v, code;
  };
  std::vector<Entry> kept;
  std::uint64_t code = 0;
  while (true) {
    std::uint64_t q0 = 1, q1 = static_cast<std::uint64_t>(a[0]);  // q_{k-1}, q_k
    std::uint64_t v_prev = 0, v_cur = static_cast<std::uint64_t>(a[0] - 1);
    if (m >= 2) {
      v_prev = v_cur;
      v_cur = static_cast<std::uint64_t>(a[1]) * v_prev;
    }
    for (std::size_t k = 2; k <= um; ++k) {
      const auto ak = static_cast<std::uint64_t>(a[k - 1]);
      const std::uint64_t q2 = ak * q1 + q0;
      q0 = q1;
      q1 = q2;
      if (k >= 3) {
        const std::size_t r = k % static_cast<std::size_t>(R);
        std::uint64_t vn;
        if (r == 0 || r == 1) vn = (ak - 1) * v_cur;
        else if (r == 2) vn = ak * v_cur;
        else vn = ak * v_cur + v_prev;
        v_prev = v_cur;
        v_cur = vn;
      }
    }
    all.push_back(q1);
    if (v_cur > 0) kept.push_back({q1, v_cur, code});
    std::size_t i = 0;
    while (i < um && a[i] == M) a[i++] = 1;
    if (i == um) break;
    ++a[i];
    ++code;
  }
  std::sort(kept.begin(), kept.end(), [](const Entry& x, const Entry& y) {
    return x.q != y.q ? x.q > y.q : x.code < y.code;
  });
  const std::size_t n = kept.size();
  q_.resize(n);
  v_.resize(n);
  digits_.resize(n * um);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> by_code(n);
  for (std::size_t i = 0; i < n; ++i) {
    q_[i] = kept[i].q;
    v_[i] = kept[i].v;
    std::uint64_t c = kept[i].code;
    for (std::size_t k = 0; k < um; ++k) {
      digits_[i * um + k] = static_cast<std::uint8_t>(c % static_cast<std::uint64_t>(M) + 1);
      c /= static_cast<std::uint64_t>(M);
    }
    by_code[i] = {kept[i].code, static_cast<std::uint32_t>(i)};
  }
  std::sort(by_code.begin(), by_code.end());
  codes_.resize(n);
  code_index_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    codes_[i] = by_code[i].first;
    code_index_[i] = by_code[i].second;
  }

  std::sort(all.begin(), all.end(), std::greater<>());
  for (std::uint64_t q : all) {
    if (!all_q_.empty() && all_q_.back().first == q) ++all_q_.back().second;
    else all_q_.emplace_back(q, 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!weighted_q_.empty() && weighted_q_.back().first == q_[i]) weighted_q_.back().second += v_[i];
    else weighted_q_.emplace_back(q_[i], v_[i]);
  }
}

std::optional<std::size_t> BlockTable::find(std::span<const int> a) const {
  if (a.size() != static_cast<std::size_t>(m_)) return std::nullopt;
  std::uint64_t code = 0;
  for (std::size_t k = a.size(); k-- > 0;) {
    if (a[k] < 1 || a[k] > M_) return std::nullopt;
    code = code * static_cast<std::uint64_t>(M_) + static_cast<std::uint64_t>(a[k] - 1);
  }
  auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code) return std::nullopt;
  return code_index_[static_cast<std::size_t>(it - codes_.begin())];
}

std::shared_ptr<const BlockTable> block_table(int M, int R, int m) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const BlockTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{M, R, m}];
  if (!slot) slot = std::make_shared<const BlockTable>(M, R, m);
  return slot;
}

double eval_T(const BlockTable& table, double kappa) {
  Kahan s;
  const double e = 1 - 2 * kappa;
  for (const auto& [q, v] : table.weighted_q())
    s.add(static_cast<double>(v) * std::pow(static_cast<double>(q), e));
  return s.sum;
}

double eval_omega_sum(const BlockTable& table, double omega) {
  Kahan s;
  for (const auto& [q, count] : table.all_q())
    s.add(static_cast<double>(count) * std::pow(static_cast<double>(q), -2 * omega));
  return s.sum;
}

double sigma_m(const BlockTable& table, double kappa) {
  Kahan num;
  const double e = 1 - 2 * kappa;
  for (const auto& [q, v] : table.weighted_q()) {
    const double x = static_cast<double>(q);
    num.add(static_cast<double>(v) * std::pow(x, e) * std::log(x));
  }
  return num.sum / (eval_T(table, kappa) * table.m());
}

namespace {

// Root of a decreasing function f with f(lo) > 1 > f(hi).
template <class F>
double bisect_unit(F&& f, double lo, double hi, const char* what) {
  if (!(f(lo) > 1) || !(f(hi) < 1))
    throw std::domain_error(std::string("no admissible exponent: ") + what + " has no root in the bracket");
  double best = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double val = f(mid);
    best = mid;
    if (val == 1.0) break;
    if (val > 1) lo = mid;
    else hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  return best;
}

}  // namespace

double solve_kappa(const BlockTable& table) {
  return bisect_unit([&](double k) { return eval_T(table, k); }, 0.5 + 1e-6, 4.0, "T_m(kappa) = 1");
}

double solve_omega(const BlockTable& table) {
  return bisect_unit([&](double w) { return eval_omega_sum(table, w); }, 0.0, 4.0, "sum q^{-2 omega} = 1");
}

ExponentReport exponents(const BlockTable& table, std::optional<double> kappa) {
  ExponentReport r;
  r.M = table.M();
  r.R = table.R();
  r.m = table.m();
  r.kappa_star = solve_kappa(table);
  r.kappa_residual = eval_T(table, r.kappa_star) - 1;
  r.omega = solve_omega(table);
  r.omega_residual = eval_omega_sum(table, r.omega) - 1;
  r.kappa = kappa.value_or(r.kappa_star);
  r.T_m = eval_T(table, r.kappa);
  r.sigma_m = sigma_m(table, r.kappa);
  return r;
}

bool Conformance::get(const std::string& name) const {
  for (const auto& [k, v] : items)
    if (k == name) return v;
  throw std::out_of_range("conformance item " + name);
}

void Conformance::set(const std::string& name, bool value) {
  for (auto& [k, v] : items)
    if (k == name) {
      v = value;
      return;
    }
  items.emplace_back(name, value);
}

Measure::Measure(const MeasureParams& params, std::shared_ptr<const BlockTable> table) : params_(params) {
  params_.validate();
  table_ = table ? std::move(table) : block_table(params.M, params.R, params.m);
  if (table_->M() != params.M || table_->R() != params.R || table_->m() != params.m)
    throw std::invalid_argument("measure: block table does not match params");
  if (table_->size() == 0) throw std::domain_error("measure: V_m(a) is empty for every a");
  T_ = eval_T(*table_, params_.kappa);
  sigma_ = sigma_m(*table_, params_.kappa);
  try {
    kappa_star_ = solve_kappa(*table_);
  } catch (const std::domain_error&) {
    kappa_star_ = std::nan("");
  }
  const std::size_t n = table_->size();
  weight_.resize(n);
  log_q_.resize(n);
  std::vector<double> a_mass(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = static_cast<double>(table_->q(i));
    weight_[i] = std::pow(q, 1 - 2 * params_.kappa) / T_;
    log_q_[i] = std::log(q);
    a_mass[i] = weight_[i] * static_cast<double>(table_->v(i));
  }
  // Walker alias table, built deterministically.
  alias_prob_.assign(n, 0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  Kahan total;
  for (double x : a_mass) total.add(x);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = a_mass[i] / total.sum * static_cast<double>(n);
    (scaled[i] < 1 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    alias_prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1;
    if (scaled[l] < 1) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) alias_prob_[i] = 1;
  for (auto i : small) alias_prob_[i] = 1;
  compute_prob_E();
}

bool Measure::in_E(std::span<const double> log_qs) const {
  double s = 0;
  for (double x : log_qs) s += x;
  const double mean = s / static_cast<double>(log_qs.size());
  const double target = params_.m * sigma_;
  return std::abs(mean - target) <= params_.epsilon * target;
}

void Measure::compute_prob_E() {
  const std::size_t n = table_->size();
  const double target = params_.m * sigma_;
  if (params_.j0 == 1) {
    Kahan p;
    for (std::size_t i = 0; i < n; ++i) {
      const double lq = log_q_[i];
      if (in_E(std::span<const double>(&lq, 1))) p.add(weight_[i] * static_cast<double>(table_->v(i)));
    }
    prob_E_ = p.sum;
    prob_E_exact_ = true;
    return;
  }
  if (params_.j0 == 2) {
    // distinct log q with aggregated mass, ascending
    std::vector<std::pair<double, double>> lw;
    for (std::size_t i = n; i-- > 0;) {
      const double w = weight_[i] * static_cast<double>(table_->v(i));
      if (!lw.empty() && lw.back().first == log_q_[i]) lw.back().second += w;
      else lw.emplace_back(log_q_[i], w);
    }
    std::vector<double> prefix(lw.size() + 1, 0);
    for (std::size_t i = 0; i < lw.size(); ++i) prefix[i + 1] = prefix[i] + lw[i].second;
    Kahan p;
    const double lo_sum = 2 * target * (1 - params_.epsilon), hi_sum = 2 * target * (1 + params_.epsilon);
    for (const auto& [l1, w1] : lw) {
      auto lo = std::lower_bound(lw.begin(), lw.end(), lo_sum - l1,
                                 [](const auto& e, double x) { return e.first < x; });
      auto hi = std::upper_bound(lw.begin(), lw.end(), hi_sum - l1,
                                 [](double x, const auto& e) { return x < e.first; });
      // recheck the edges with the exact predicate used by the sampler
      auto inside = [&](double l2) {
        const double pair[2] = {l1, l2};
        return in_E(pair);
      };
      while (lo != lw.begin() && inside(std::prev(lo)->first)) --lo;
      while (lo != hi && !inside(lo->first)) ++lo;
      while (hi != lw.end() && inside(hi->first)) ++hi;
      while (hi != lo && !inside(std::prev(hi)->first)) --hi;
      p.add(w1 * (prefix[static_cast<std::size_t>(hi - lw.begin())] - prefix[static_cast<std::size_t>(lo - lw.begin())]));
    }
    prob_E_ = p.sum;
    prob_E_exact_ = true;
    return;
  }
  // Monte Carlo on a reserved stream.
  constexpr std::size_t kDraws = 200000;
  CounterRng rng(params_.seed, 0xE0E0E0E0E0E0E0E0ull);
  std::vector<double> lq(static_cast<std::size_t>(params_.j0));
  std::size_t hits = 0;
  std::vector<int> b;
  for (std::size_t t = 0; t < kDraws; ++t) {
    for (auto& x : lq) x = log_q_[draw_block(rng, b)];
    if (in_E(lq)) ++hits;
  }
  prob_E_ = static_cast<double>(hits) / static_cast<double>(kDraws);
  prob_E_exact_ = false;
}

Conformance Measure::conformance() const {
  Conformance c;
  const double k = params_.kappa, e = params_.epsilon;
  const double ms = params_.m * sigma_;
  c.set("kappa_gt_half", k > 0.5);
  c.set("kappa_in_1_2", k > 1 && k < 2);
  c.set("kappa_below_kappa_star", std::isfinite(kappa_star_) && k < kappa_star_);
  c.set("T_m_gt_4", T_ > 4);
  c.set("m_ge_100", params_.m >= 100);
  c.set("m_conditions", std::max(std::log(2.0) / ms, 3.0 / params_.m) < e);
  c.set("R_is_large", std::log(27.0) / (params_.R * sigma_) < e);
  c.set("P_E_gt_half", prob_E_ > 0.5);
  c.set("P_E_exact", prob_E_exact_);
  c.set("conditioning", params_.conditioning);
  return c;
}

std::vector<int> Measure::draw_b(std::size_t i, CounterRng& rng) const {
  const auto a = table_->word(i);
  const std::size_t m = a.size();
  const int R = params_.R;
  // completions[k][st]: ways to fill positions k+1..m after position k with state st
  std::vector<std::array<std::uint64_t, 2>> completions(m + 1);
  completions[m] = {1, 1};
  auto range = [&](std::size_t pos, int st) {  // pos is 1-based
    const int ak = a[pos - 1];
    int lo = 0, hi = ak - (st ? 1 : 0);
    if (symbolic::is_constrained(pos, R)) {
      lo = 1;
      hi = std::min(hi, ak - 1);
    }
    return std::pair<int, int>{lo, hi};
  };
  for (std::size_t k = m; k-- > 0;) {
    for (int st = 0; st < 2; ++st) {
      auto [lo, hi] = range(k + 1, st);
      std::uint64_t total = 0;
      for (int d = lo; d <= hi; ++d) total += completions[k + 1][d > 0 ? 1 : 0];
      completions[k][static_cast<std::size_t>(st)] = total;
    }
  }
  std::uint64_t r = rng.below(completions[0][1]);
  std::vector<int> b(m);
  int st = 1;
  for (std::size_t k = 0; k < m; ++k) {
    auto [lo, hi] = range(k + 1, st);
    for (int d = lo; d <= hi; ++d) {
      const std::uint64_t c = completions[k + 1][d > 0 ? 1 : 0];
      if (r < c) {
        b[k] = d;
        break;
      }
      r -= c;
    }
    st = b[k] > 0 ? 1 : 0;
  }
  return b;
}

std::size_t Measure::draw_block(CounterRng& rng, std::vector<int>& b) const {
  const std::uint64_t n = alias_prob_.size();
  const std::size_t u = static_cast<std::size_t>(rng.below(n));
  const double coin = rng.uniform();
  const std::size_t i = coin < alias_prob_[u] ? u : alias_[u];
  b = draw_b(i, rng);
  return i;
}

SamplePoint Measure::sample_point(std::uint64_t stream, int N, std::optional<double> precision,
                                  int max_N) const {
  if (N < 1) throw std::invalid_argument("sample_point: N must be >= 1");
  return sample_until(stream, [&](const SamplePoint& s, const BigInt&) {
    if (s.groups < N) return false;
    if (!precision || std::max(s.res_alpha, s.res_gamma) < *precision) return true;
    if (s.groups >= max_N) throw DepthError("depth guard: residual target not reached within max blocks");
    return false;
  });
}

SamplePoint Measure::sample_to_depth(std::uint64_t stream, const BigInt& min_qJm1, int max_groups) const {
  return sample_until(stream, [&](const SamplePoint& s, const BigInt& qJm1) {
    if (qJm1 >= min_qJm1) return true;
    if (s.groups >= max_groups) throw DepthError("depth guard: q_{J-1} target not reached within max blocks");
    return false;
  });
}

SamplePoint Measure::sample_until(std::uint64_t stream,
                                  const std::function<bool(const SamplePoint&, const BigInt&)>& stop) const {
  CounterRng rng(params_.seed, stream);
  SamplePoint s;
  BigInt p0 = 1, p1 = 0, q0 = 0, q1 = 1;  // p_{k-1}, p_k, q_{k-1}, q_k
  BigInt P_b = 0, t;
  s.n_b = 0;
  const std::size_t j0 = static_cast<std::size_t>(params_.j0);
  std::vector<std::size_t> idx(j0);
  std::vector<std::vector<int>> bs(j0);
  std::vector<double> lq(j0);
  int groups = 0;
  while (true) {
    std::uint64_t tries = 0;
    while (true) {
      ++tries;
      ++s.attempts;
      for (std::size_t g = 0; g < j0; ++g) {
        idx[g] = draw_block(rng, bs[g]);
        lq[g] = log_q_[idx[g]];
      }
      if (!params_.conditioning || in_E(lq)) break;
      if (tries >= kRejectionCap)
        throw GuardError("rejection cap: E too small for these params (P(E) = " + std::to_string(prob_E_) + ")");
    }
    for (std::size_t g = 0; g < j0; ++g) {
      const auto a = table_->word(idx[g]);
      for (std::size_t k = 0; k < a.size(); ++k) {
        const int ak = a[k], bk = bs[g][k];
        // b_{k+1} pairs with p_k, q_k before the update
        if (bk != 0) {
          s.n_b += bk * q1;
          P_b += bk * p1;
        }
        t = ak * p1 + p0;
        p0 = p1;
        p1 = t;
        t = ak * q1 + q0;
        q0 = q1;
        q1 = t;
        s.words.a.push_back(ak);
        s.words.b.push_back(bk);
      }
    }
    ++groups;
    s.groups = groups;
    s.J = static_cast<int>(s.words.a.size());
    const double lqJ = log_big(q1);
    s.res_alpha = std::exp(-2 * lqJ);
    s.res_gamma = std::exp(-lqJ) + (sgn(s.n_b) > 0 ? std::exp(log_big(s.n_b) - 2 * lqJ) : 0.0);
    if (stop(s, q0)) break;
  }
  s.q_J = q1;
  s.q_Jm1 = q0;
  s.alpha = make_rational(p1, q1);
  s.gamma = make_rational(s.n_b * p1 - P_b * q1, q1);
  return s;
}

CylinderReport Measure::cylinder_measure(const CylinderId& id) const {
  const std::size_t m = static_cast<std::size_t>(params_.m);
  const std::size_t j0 = static_cast<std::size_t>(params_.j0);
  const std::size_t J = id.a.size();
  if (J == 0 || J % (m * j0) != 0 || id.b.size() != J)
    throw std::invalid_argument("cylinder: word length must be a positive multiple of j0 m");
  const std::size_t N = J / (m * j0);
  CylinderReport r;
  r.in_E = true;
  bool support = true;
  double log_measure = 0;
  const symbolic::DigitSpaceParams dsp{params_.M, params_.R};
  std::vector<double> lq(j0);
  for (std::size_t g = 0; g < N && support; ++g) {
    for (std::size_t h = 0; h < j0; ++h) {
      const std::size_t off = (g * j0 + h) * m;
      std::vector<int> a(id.a.begin() + static_cast<long>(off), id.a.begin() + static_cast<long>(off + m));
      std::vector<int> b(id.b.begin() + static_cast<long>(off), id.b.begin() + static_cast<long>(off + m));
      auto i = table_->find(a);
      if (!i || !symbolic::check_membership(contfrac::CFWord(a), b, dsp)) {
        support = false;
        break;
      }
      lq[h] = log_q_[*i];
      log_measure += std::log(weight_[*i]);
    }
    if (!support) break;
    if (!in_E(lq)) r.in_E = false;
    if (params_.conditioning) log_measure += std::log(c_lambda());
  }
  if (params_.conditioning && !r.in_E) support = false;
  r.log_measure = support ? log_measure : -INFINITY;
  r.measure = support ? std::exp(log_measure) : 0.0;

  const double k = params_.kappa, e = params_.epsilon;
  const double logQ0 = static_cast<double>(j0 * m) * sigma_;
  const double dN = static_cast<double>(N);
  const double log_lower = -static_cast<double>(j0 - 1) * std::log(2.0) + (1 - 2 * k) * (1 + 2 * e) * dN * logQ0 -
                           static_cast<double>(j0) * dN * std::log(T_);
  const double log_upper = dN * std::log(2.0) + (1 - 2 * k) * (1 - 2 * e) * dN * logQ0 -
                           static_cast<double>(j0) * dN * std::log(T_);
  r.lower = std::exp(log_lower);
  r.upper = std::exp(log_upper);
  r.sandwich = support && r.log_measure >= log_lower - 1e-12 && r.log_measure <= log_upper + 1e-12;

  const contfrac::ConvergentTable t(contfrac::CFWord(id.a));
  r.log_q = log_big(t.den(static_cast<int>(J)));
  r.log_Q = static_cast<double>(J) * sigma_;
  r.q_sandwich = r.log_q >= (1 - 2 * e) * r.log_Q && r.log_q <= (1 + 2 * e) * r.log_Q;
  r.q_prev_bound = log_big(t.den(static_cast<int>(J) - 1)) >= (1 - 2 * e) * r.log_Q - std::log(2.0 * params_.M);
  return r;
}

std::vector<CylinderId> Measure::all_cylinders(int N, std::size_t guard) const {
  if (N < 1) throw std::invalid_argument("all_cylinders: N must be >= 1");
  // single-block pairs
  std::vector<CylinderId> blocks;
  for (std::size_t i = 0; i < table_->size(); ++i) {
    const auto w = table_->word(i);
    std::vector<int> a(w.begin(), w.end());
    for (auto& b : symbolic::enumerate_V(contfrac::CFWord(a), params_.R)) blocks.push_back({a, std::move(b)});
  }
  const std::size_t depth = static_cast<std::size_t>(N * params_.j0);
  double total = std::pow(static_cast<double>(blocks.size()), static_cast<double>(depth));
  if (total > static_cast<double>(guard)) throw GuardError("all_cylinders: count exceeds guard");
  std::vector<CylinderId> out;
  std::vector<std::size_t> pick(depth, 0);
  while (true) {
    CylinderId c;
    for (std::size_t d = 0; d < depth; ++d) {
      c.a.insert(c.a.end(), blocks[pick[d]].a.begin(), blocks[pick[d]].a.end());
      c.b.insert(c.b.end(), blocks[pick[d]].b.begin(), blocks[pick[d]].b.end());
    }
    bool keep = true;
    if (params_.conditioning) {
      std::vector<double> lq(static_cast<std::size_t>(params_.j0));
      for (std::size_t g = 0; g < static_cast<std::size_t>(N) && keep; ++g) {
        for (std::size_t h = 0; h < lq.size(); ++h) {
          const auto& a = blocks[pick[g * lq.size() + h]].a;
          lq[h] = log_q_[*table_->find(a)];
        }
        keep = in_E(lq);
      }
    }
    if (keep) out.push_back(std::move(c));
    std::size_t d = depth;
    while (d-- > 0) {
      if (++pick[d] < blocks.size()) break;
      pick[d] = 0;
      if (d == 0) return out;
    }
  }
}

FourierRun fourier_estimate(const Measure& mu, const std::vector<std::pair<long, long>>& ks, std::size_t S,
                            int threads) {
  if (S < 1000) throw std::invalid_argument("fourier: at least 1000 samples required");
  long kmax = 1;
  for (const auto& [k1, k2] : ks) kmax = std::max({kmax, std::abs(k1), std::abs(k2)});
  const double stderr_ = 1.0 / std::sqrt(static_cast<double>(S));
  FourierRun run;
  run.precision = stderr_ / (10 * kTwoPi * static_cast<double>(kmax));

  constexpr std::size_t kChunk = 2048;
  const std::size_t n_chunks = (S + kChunk - 1) / kChunk;
  const std::size_t nk = ks.size();
  std::vector<std::vector<double>> re(n_chunks, std::vector<double>(nk)), im(n_chunks, std::vector<double>(nk));
  std::vector<double> depth_sum(n_chunks, 0), attempts(n_chunks, 0), accepted(n_chunks, 0);
  std::vector<int> depth_max(n_chunks, 0);
  parallel_chunks(S, kChunk, threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& r = re[c];
    auto& i = im[c];
    for (std::size_t s = begin; s < end; ++s) {
      const SamplePoint p = mu.sample_point(s, 1, run.precision);
      const double a = p.alpha.get_d(), g = p.gamma.get_d();
      for (std::size_t j = 0; j < nk; ++j) {
        double theta = static_cast<double>(ks[j].first) * a + static_cast<double>(ks[j].second) * g;
        theta -= std::round(theta);  // odd in theta, so -k gives the exact conjugate
        r[j] += std::cos(kTwoPi * theta);
        i[j] -= std::sin(kTwoPi * theta);
      }
      depth_sum[c] += p.J;
      depth_max[c] = std::max(depth_max[c], p.J);
      attempts[c] += static_cast<double>(p.attempts);
      accepted[c] += p.groups;
    }
  });
  run.estimates.resize(nk);
  double dsum = 0, asum = 0, gsum = 0;
  for (std::size_t j = 0; j < nk; ++j) {
    double sr = 0, si = 0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
      sr += re[c][j];
      si += im[c][j];
    }
    auto& e = run.estimates[j];
    e.k1 = ks[j].first;
    e.k2 = ks[j].second;
    e.value = {sr / static_cast<double>(S), si / static_cast<double>(S)};
    e.stderr_ = stderr_;
    e.S = S;
  }
  for (std::size_t c = 0; c < n_chunks; ++c) {
    dsum += depth_sum[c];
    asum += attempts[c];
    gsum += accepted[c];
    run.max_depth = std::max(run.max_depth, depth_max[c]);
  }
  run.mean_depth = dsum / static_cast<double>(S);
  run.acceptance_rate = gsum / asum;
  return run;
}

BallMassProfile ball_mass_profile(const std::vector<std::pair<double, double>>& points,
                                  const std::vector<double>& radii, std::size_t n_probes, int threads) {
  if (points.empty()) throw std::invalid_argument("ball mass: empty point set");
  n_probes = std::min(n_probes, points.size());
  const std::size_t nr = radii.size();
  std::vector<std::vector<double>> mass(n_probes, std::vector<double>(nr));
  parallel_chunks(n_probes, 1, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> d2(points.size());
    for (std::size_t p = begin; p < end; ++p) {
      const auto [x0, y0] = points[p];
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double dx = points[i].first - x0, dy = points[i].second - y0;
        d2[i] = dx * dx + dy * dy;
      }
      std::sort(d2.begin(), d2.end());
      for (std::size_t r = 0; r < nr; ++r) {
        const auto cnt = std::upper_bound(d2.begin(), d2.end(), radii[r] * radii[r]) - d2.begin();
        mass[p][r] = static_cast<double>(cnt) / static_cast<double>(points.size());
      }
    }
  });
  BallMassProfile out;
  out.radii = radii;
  out.max_mass.assign(nr, 0);
  for (std::size_t p = 0; p < n_probes; ++p)
    for (std::size_t r = 0; r < nr; ++r) out.max_mass[r] = std::max(out.max_mass[r], mass[p][r]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < nr; ++r) {
    if (out.max_mass[r] <= 0) continue;
    const double x = std::log(radii[r]), y = std::log(out.max_mass[r]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double dn = static_cast<double>(n);
  out.slope = n >= 2 ? (dn * sxy - sx * sy) / (dn * sxx - sx * sx) : std::nan("");
  return out;
}

FrostmanReport frostman_scan(const Measure& mu, std::size_t S, const std::vector<double>& radii,
                             std::size_t n_probes, int threads) {
  if (S < 10000) throw std::invalid_argument("frostman: at least 10^4 samples required");
  if (radii.empty()) throw std::invalid_argument("frostman: empty radius grid");
  const double rmin = *std::min_element(radii.begin(), radii.end());
  const double precision = rmin / 1000;
  std::vector<std::pair<double, double>> pts(S);
  parallel_chunks(S, 2048, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const SamplePoint p = mu.sample_point(s, 1, precision);
      pts[s] = {p.alpha.get_d(), p.gamma.get_d()};
    }
  });
  FrostmanReport rep;
  rep.S = S;
  rep.profile = ball_mass_profile(pts, radii, n_probes, threads);
  const double k = mu.params().kappa, e = mu.params().epsilon;
  rep.theoretical_exponent = 2 * k - 2 - 4 * (2 - k) * e;
  const auto top = static_cast<std::size_t>(std::max_element(radii.begin(), radii.end()) - radii.begin());
  const double s = rep.theoretical_exponent;
  rep.envelope_c = rep.profile.max_mass[top] / std::pow(radii[top], s);
  rep.envelope_holds = true;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double pm = rep.profile.max_mass[r];
    const double slack = 3 * std::sqrt(pm * (1 - pm) / static_cast<double>(S));
    if (pm > rep.envelope_c * std::pow(radii[r], s) + slack) rep.envelope_holds = false;
  }
  return rep;
}

}  // namespace badapprox::kaufman
