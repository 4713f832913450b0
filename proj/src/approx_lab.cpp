#include "badapprox/approx_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "badapprox/ostrowski.hpp"
#include "badapprox/parallel.hpp"

namespace badapprox::approx_lab {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> parse_doubles(std::string_view text) {
  std::vector<double> out;
  std::string s(text);
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number: " + item);
    out.push_back(v);
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

BigInt lcm_of(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt out;
  mpz_fdiv_r(out.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return out;
}

long double ld_of(const BigInt& n) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
  return std::ldexp(static_cast<long double>(mant), static_cast<int>(exp));
}

long double ld_ratio(const BigInt& num, const BigInt& den) {
  long e1 = 0, e2 = 0;
  const double m1 = mpz_get_d_2exp(&e1, num.get_mpz_t());
  const double m2 = mpz_get_d_2exp(&e2, den.get_mpz_t());
  if (m1 == 0) return 0;
  return std::ldexp(static_cast<long double>(m1) / m2, static_cast<int>(e1 - e2));
}

// q_{J-1} of a sample; falls back to den(alpha) when no table is attached.
BigInt depth_of(const SamplePoint& s) { return s.q_J != 0 ? s.q_Jm1 : BigInt(s.alpha.get_den()); }

// Gauss-Legendre nodes on [-1, 1].
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (z * p1 - p0) / (z * z - 1);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) {
          x[static_cast<std::size_t>(i)] = z;
          w[static_cast<std::size_t>(i)] = 2 / ((1 - z * z) * dp * dp);
          break;
        }
      }
    }
  }
};

const GaussLegendre& gl16() {
  static const GaussLegendre g(16);
  return g;
}

}  // namespace

// ---------------------------------------------------------------- lacunary

double PsiSpec::value(long t, const BigInt& n) const {
  if (t < 1) throw std::invalid_argument("psi: t must be >= 1");
  double v = 0;
  switch (family) {
    case PsiFamily::Constant: v = c; break;
    case PsiFamily::Harmonic: v = c / static_cast<double>(t); break;
    case PsiFamily::Power: v = c * std::pow(static_cast<double>(t), -p); break;
    case PsiFamily::LogInverse: v = n <= 1 ? 0.0 : 1.0 / (8.0 * log_big(n)); break;
    case PsiFamily::Table:
      if (static_cast<std::size_t>(t) > table.size()) throw std::out_of_range("psi table shorter than N");
      v = table[static_cast<std::size_t>(t - 1)];
      break;
  }
  if (!(v >= 0 && v <= 1)) throw std::invalid_argument("psi value outside [0,1] at t = " + std::to_string(t));
  return v;
}

PsiSpec PsiSpec::parse(std::string_view text) {
  PsiSpec s;
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "log8") {
    s.family = PsiFamily::LogInverse;
    return s;
  }
  const auto vals = parse_doubles(rest);
  if (head == "const" && vals.size() == 1) {
    s.family = PsiFamily::Constant;
    s.c = vals[0];
  } else if (head == "harmonic" && vals.size() == 1) {
    s.family = PsiFamily::Harmonic;
    s.c = vals[0];
  } else if (head == "power" && vals.size() == 2) {
    s.family = PsiFamily::Power;
    s.c = vals[0];
    s.p = vals[1];
  } else if (head == "table" && !vals.empty()) {
    s.family = PsiFamily::Table;
    s.table = vals;
  } else {
    throw std::invalid_argument("unknown psi spec: " + std::string(text));
  }
  return s;
}

std::string PsiSpec::describe() const {
  switch (family) {
    case PsiFamily::Constant: return "const:" + fmt(c);
    case PsiFamily::Harmonic: return "harmonic:" + fmt(c);
    case PsiFamily::Power: return "power:" + fmt(c) + "," + fmt(p);
    case PsiFamily::LogInverse: return "log8";
    case PsiFamily::Table: {
      std::string out = "table:";
      for (std::size_t i = 0; i < table.size(); ++i) out += (i ? "," : "") + fmt(table[i]);
      return out;
    }
  }
  return {};
}

std::vector<BigInt> SequenceSpec::terms(int N) const {
  if (N < 1) throw std::invalid_argument("sequence: N must be >= 1");
  std::vector<BigInt> out;
  out.reserve(static_cast<std::size_t>(N));
  if (!explicit_terms.empty()) {
    if (explicit_terms.size() < static_cast<std::size_t>(N))
      throw std::invalid_argument("sequence: explicit list shorter than N");
    out.assign(explicit_terms.begin(), explicit_terms.begin() + N);
    return out;
  }
  if (n1 < 1) throw std::invalid_argument("sequence: n_1 must be >= 1");
  if (rho <= 1) throw std::invalid_argument("sequence: rho must exceed 1");
  BigInt num = n1, den = 1, c;
  const BigInt rn = rho.get_num(), rd = rho.get_den();
  for (long t = 1; static_cast<int>(out.size()) < N; ++t) {
    mpz_cdiv_q(c.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (out.empty() || c > out.back()) out.push_back(c);
    num *= rn;
    den *= rd;
    if (t > 1000L * N + 100000) throw GuardError("sequence: too many repeats");
  }
  return out;
}

SequenceSpec SequenceSpec::parse(std::string_view text) {
  SequenceSpec s;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("sequence spec needs geom: or list:");
  const std::string_view head = text.substr(0, colon), rest = text.substr(colon + 1);
  if (head == "geom") {
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos) throw std::invalid_argument("geom:n1,rho expected");
    s.n1 = parse_bigint(rest.substr(0, comma));
    s.rho = parse_rational(rest.substr(comma + 1));
  } else if (head == "list") {
    std::string r(rest);
    std::stringstream ss(r);
    std::string item;
    while (std::getline(ss, item, ',')) s.explicit_terms.push_back(parse_bigint(item));
    if (s.explicit_terms.empty()) throw std::invalid_argument("empty sequence list");
  } else {
    throw std::invalid_argument("unknown sequence spec: " + std::string(text));
  }
  return s;
}

std::string SequenceSpec::describe() const {
  if (explicit_terms.empty()) return "geom:" + to_string(n1) + "," + to_string(rho);
  std::string out = "list:";
  for (std::size_t i = 0; i < explicit_terms.size(); ++i) out += (i ? "," : "") + to_string(explicit_terms[i]);
  return out;
}

void LacunaryConfig::validate() const {
  if (N < 1) throw std::invalid_argument("lacunary: N must be >= 1");
  const auto n = sequence.terms(N);
  if (n.front() < 1) throw std::invalid_argument("lacunary: terms must be positive");
  for (std::size_t i = 1; i < n.size(); ++i)
    if (n[i] <= n[i - 1]) throw std::invalid_argument("lacunary: terms must be strictly increasing");
  for (int t = 1; t <= N; ++t) psi.value(t, n[static_cast<std::size_t>(t - 1)]);
}

LacunaryPlan make_plan(const LacunaryConfig& config) {
  config.validate();
  LacunaryPlan plan;
  plan.n = config.sequence.terms(config.N);
  double acc = 0;
  plan.min_ratio = plan.n.size() > 1 ? 1e300 : 0;
  for (int t = 1; t <= config.N; ++t) {
    const auto& n = plan.n[static_cast<std::size_t>(t - 1)];
    const double v = config.psi.value(t, n);
    plan.psi.push_back(v);
    plan.psi_exact.push_back(rational_from_double(v));
    acc += v;
    plan.Psi.push_back(acc);
    if (t > 1) plan.min_ratio = std::min(plan.min_ratio, to_double(make_rational(n, plan.n[static_cast<std::size_t>(t - 2)])));
  }
  return plan;
}

long CountReport::count_upto(int t) const {
  return static_cast<long>(std::upper_bound(hits.begin(), hits.end(), t) - hits.begin());
}

BigInt required_depth(const LacunaryPlan& plan) { return BigInt(kDepthFactor) * plan.n.back(); }

CountReport count_hits(const SamplePoint& sample, const LacunaryPlan& plan) {
  const BigInt need = required_depth(plan);
  if (depth_of(sample) < need) throw DepthError("depth guard: q_{J-1} < 1e4 n_N");
  CountReport r;
  r.N = plan.N();
  r.Psi = plan.Psi.back();

  const Rational& alpha = sample.alpha;
  const Rational& gamma = sample.gamma;
  // residual of the truncated point: n / q_J^2 + 1 / q_J + n_b / q_J^2
  const bool has_res = sample.q_J != 0;
  const BigInt qJ2 = sample.q_J * sample.q_J;

  // second path: integers modulo the common denominator
  const BigInt L = lcm_of(alpha.get_den(), gamma.get_den());
  const BigInt A = alpha.get_num() * (L / alpha.get_den());
  const BigInt G = gamma.get_num() * (L / gamma.get_den());

  r.paths_agree = true;
  Rational x, d, diff;
  BigInt rr, dn, lhs, rhs;
  for (int t = 1; t <= r.N; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const BigInt& n = plan.n[i];
    const Rational& psi = plan.psi_exact[i];

    x = n * alpha - gamma;
    d = dist_to_int(x);
    const bool hit = d <= psi;
    if (hit) {
      ++r.count;
      r.hits.push_back(t);
    }
    if (has_res) {
      diff = abs(d - psi);
      if (diff <= make_rational(n + sample.q_J + sample.n_b, qJ2)) ++r.boundary_flags;
    } else if (d == psi) {
      ++r.boundary_flags;
    }

    rr = mod_floor(n * A - G, L);
    dn = L - rr;
    if (rr < dn) dn = rr;
    lhs = dn * psi.get_den();
    rhs = psi.get_num() * L;
    const bool hit2 = lhs <= rhs;
    if (hit2) ++r.count_modular;
    if (hit2 != hit) r.paths_agree = false;
  }
  r.ratio = r.Psi > 0 ? static_cast<double>(r.count) / (2 * r.Psi) : 0.0;
  return r;
}

CountReport count_hits(const SamplePoint& sample, const LacunaryConfig& config) {
  return count_hits(sample, make_plan(config));
}

SamplePoint lacunary_sample(const kaufman::Measure& mu, std::uint64_t stream, const LacunaryPlan& plan) {
  return mu.sample_to_depth(stream, required_depth(plan));
}

AsymptoticSummary asymptotic_check(const std::vector<SamplePoint>& samples, const LacunaryConfig& config,
                                   double band, int threads) {
  const LacunaryPlan plan = make_plan(config);
  AsymptoticSummary out;
  out.Psi = plan.Psi.back();
  out.psi_sufficient = out.Psi >= 4;
  out.band = band;
  out.rows.resize(samples.size());
  const double P = out.Psi;
  const double scale = std::pow(P, 2.0 / 3.0) * std::pow(std::log(2 + P), 3);
  parallel_chunks(samples.size(), 1, threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto& row = out.rows[i];
      try {
        row.report = count_hits(samples[i], plan);
        row.normalized_error = scale > 0 ? std::abs(row.report.count - 2 * P) / scale : 0.0;
      } catch (const DepthError&) {
        row.excluded = true;
      }
    }
  });
  std::vector<double> ratios;
  long in_band = 0;
  for (const auto& row : out.rows) {
    if (row.excluded) {
      ++out.excluded;
      continue;
    }
    ratios.push_back(row.report.ratio);
    if (std::abs(row.report.ratio - 1) <= band) ++in_band;
    out.max_normalized_error = std::max(out.max_normalized_error, row.normalized_error);
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const std::size_t h = ratios.size() / 2;
    out.median_ratio = ratios.size() % 2 ? ratios[h] : 0.5 * (ratios[h - 1] + ratios[h]);
    out.fraction_in_band = static_cast<double>(in_band) / static_cast<double>(ratios.size());
  }
  return out;
}

// ---------------------------------------------------------------- windows

void WindowSpec::validate() const {
  if (q < 4) throw std::invalid_argument("window: q must be >= 4");
  if (!(epsilon > 0 && epsilon <= 1)) throw std::invalid_argument("window: epsilon must lie in (0,1]");
  if (!(psi_q > 0 && psi_q < 0.5)) throw std::invalid_argument("window: psi(q) must lie in (0,1/2)");
}

double chi(const WindowSpec& spec, double x) {
  const double f = x - std::floor(x);
  const double d = std::min(f, 1 - f);
  const double delta = spec.delta(), eps = spec.epsilon;
  if (spec.sign == WindowSign::Plus) {
    if (d <= delta) return 1;
    if (d <= (1 + eps) * delta) return 1 + (delta - d) / (delta * eps);
    return 0;
  }
  if (d <= (1 - eps) * delta) return 1;
  if (d <= delta) return (delta - d) / (delta * eps);
  return 0;
}

double window_value(const WindowSpec& spec, double alpha, double gamma) {
  double s = 0;
  const double q = static_cast<double>(spec.q);
  for (long p = 0; p < spec.q; ++p) s += chi(spec, alpha - (static_cast<double>(p) + gamma) / q);
  return s;
}

std::complex<double> window_coeff(const WindowSpec& spec, long k1, long k2) {
  spec.validate();
  const double eps = spec.epsilon, psi = spec.psi_q, q = static_cast<double>(spec.q);
  const bool plus = spec.sign == WindowSign::Plus;
  if (k1 == 0 && k2 == 0) return (plus ? 2 + eps : 2 - eps) * psi;
  if (k1 != -spec.q * k2) return 0.0;
  const double k = static_cast<double>(k1);
  const double a = 2 * kPi * k * psi / q;
  // cos u - cos v = 2 sin((u+v)/2) sin((v-u)/2)
  const double u = plus ? a : a * (1 - eps);
  const double v = plus ? a * (1 + eps) : a;
  const double diff = 2 * std::sin((u + v) / 2) * std::sin((v - u) / 2);
  return q * q * diff / (2 * kPi * kPi * k * k * psi * eps);
}

namespace {

std::complex<double> quad_level(const WindowSpec& spec, long k1, long k2, int level) {
  const auto& g = gl16();
  const double q = static_cast<double>(spec.q);
  const double delta = spec.delta();
  const bool plus = spec.sign == WindowSign::Plus;
  const double r_in = plus ? delta : (1 - spec.epsilon) * delta;
  const double r_out = plus ? (1 + spec.epsilon) * delta : delta;
  const double w1 = -2 * kPi * static_cast<double>(k1);
  const double w2 = -2 * kPi * static_cast<double>(k2);
  const int g_panels = static_cast<int>((std::abs(k2) + std::abs(k1) / spec.q + 2) << level);
  const double sub_rate = static_cast<double>((std::abs(k1) + 1) << level);

  std::vector<double> cuts;
  std::complex<double> total = 0;
  for (int gp = 0; gp < g_panels; ++gp) {
    const double g0 = static_cast<double>(gp) / g_panels, gh = 0.5 / g_panels;
    for (std::size_t gi = 0; gi < g.x.size(); ++gi) {
      const double gamma = g0 + gh * (1 + g.x[gi]);
      cuts.assign({0.0, 1.0});
      for (long p = 0; p < spec.q; ++p) {
        const double c = (static_cast<double>(p) + gamma) / q;
        for (double off : {-r_out, -r_in, r_in, r_out}) {
          double y = c + off;
          y -= std::floor(y);
          cuts.push_back(y);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      std::complex<double> inner = 0;
      for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const double lo = cuts[j], hi = cuts[j + 1];
        if (hi - lo <= 0) continue;
        const int nsub = std::max(1, static_cast<int>(std::ceil((hi - lo) * sub_rate)));
        const double step = (hi - lo) / nsub;
        for (int s = 0; s < nsub; ++s) {
          const double a0 = lo + s * step, ah = step / 2;
          for (std::size_t ai = 0; ai < g.x.size(); ++ai) {
            const double alpha = a0 + ah * (1 + g.x[ai]);
            const double wv = window_value(spec, alpha, gamma);
            if (wv == 0) continue;
            inner += g.w[ai] * ah * wv * std::polar(1.0, w1 * alpha);
          }
        }
      }
      total += g.w[gi] * gh * inner * std::polar(1.0, w2 * gamma);
    }
  }
  return total;
}

}  // namespace

QuadratureResult window_coeff_quadrature(const WindowSpec& spec, long k1, long k2, double tol) {
  spec.validate();
  QuadratureResult r;
  std::complex<double> prev = quad_level(spec, k1, k2, 0);
  for (int level = 1; level <= 5; ++level) {
    const std::complex<double> cur = quad_level(spec, k1, k2, level);
    r.value = cur;
    r.error = std::abs(cur - prev);
    r.refinements = level;
    if (r.error <= tol) break;
    prev = cur;
  }
  return r;
}

CoeffBoundReport coeff_bound_check(const WindowSpec& spec, long s_max) {
  spec.validate();
  CoeffBoundReport r;
  r.s_max = s_max;
  const double eps = spec.epsilon, psi = spec.psi_q;
  const bool plus = spec.sign == WindowSign::Plus;
  r.sum_bound = 12 / std::sqrt(eps);
  const double zero = window_coeff(spec, 0, 0).real();
  r.zero_term_exact = zero == (plus ? 2 + eps : 2 - eps) * psi;
  r.pointwise_ok = true;
  double sum = 0;
  for (long s = -s_max; s <= s_max; ++s) {
    const double w = std::abs(window_coeff(spec, spec.q * s, -s));
    sum += w;
    double bound = (2 + eps) * psi;
    if (s != 0) bound = std::min(bound, 1 / (kPi * kPi * static_cast<double>(s) * static_cast<double>(s) * psi * eps));
    const double ratio = w / bound;
    r.max_pointwise_ratio = std::max(r.max_pointwise_ratio, ratio);
    if (ratio > 1 + 1e-12) r.pointwise_ok = false;
  }
  r.partial_sum = sum;
  r.sum_ok = sum < r.sum_bound;
  return r;
}

MuIneqReport muineq_check(const kaufman::Measure& mu, long q, double psi_q, double epsilon, std::size_t S,
                          int threads) {
  if (S < 2) throw std::invalid_argument("muineq: S must be >= 2");
  const WindowSpec plus{q, epsilon, psi_q, WindowSign::Plus};
  const WindowSpec minus{q, epsilon, psi_q, WindowSign::Minus};
  plus.validate();
  constexpr std::size_t chunk = 1024;
  const std::size_t n_chunks = (S + chunk - 1) / chunk;
  std::vector<std::array<double, 6>> part(n_chunks, std::array<double, 6>{});
  parallel_chunks(S, chunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto& acc = part[c];
    for (std::size_t i = b; i < e; ++i) {
      const auto s = mu.sample_point(i, 1, 1e-12);
      const double a = to_double(s.alpha), g = to_double(s.gamma);
      const double lo = window_value(minus, a, g), hi = window_value(plus, a, g);
      const double x = static_cast<double>(q) * a - g;
      const double f = x - std::floor(x);
      const double ind = std::min(f, 1 - f) <= psi_q ? 1.0 : 0.0;
      acc[0] += lo;
      acc[1] += lo * lo;
      acc[2] += ind;
      acc[3] += ind;
      acc[4] += hi;
      acc[5] += hi * hi;
    }
  });
  std::array<double, 6> tot{};
  for (const auto& p : part)
    for (std::size_t j = 0; j < 6; ++j) tot[j] += p[j];
  const double n = static_cast<double>(S);
  auto se = [n](double s1, double s2) {
    const double m = s1 / n;
    return std::sqrt(std::max(0.0, s2 / n - m * m) / (n - 1));
  };
  MuIneqReport r;
  r.S = S;
  r.lower = tot[0] / n;
  r.lower_stderr = se(tot[0], tot[1]);
  r.freq = tot[2] / n;
  r.freq_stderr = se(tot[2], tot[3]);
  r.upper = tot[4] / n;
  r.upper_stderr = se(tot[4], tot[5]);
  const double s1 = std::hypot(r.lower_stderr, r.freq_stderr), s2 = std::hypot(r.upper_stderr, r.freq_stderr);
  r.holds = r.lower <= r.freq + 4 * s1 && r.freq <= r.upper + 4 * s2;
  return r;
}

// ---------------------------------------------------------- multiplicative

double MultConfig::C() const {
  const contfrac::ConvergentTable t(alpha);
  double c = 0;
  for (int k = 1; k <= t.depth(); ++k) c = std::max(c, log_big(t.den(k)) / k);
  return c;
}

namespace {

bool upper_growth_ok(const BigInt& n, double C, int t) {
  return static_cast<long double>(log_big(n)) <= std::log(4.0L) + 6.0L * C * t - 1e-9L;
}

}  // namespace

MultSequence build_mult_sequence(const MultConfig& config) {
  const CFWord& word = config.alpha;
  const contfrac::ConvergentTable tab(word);
  const int J = tab.depth();
  if (J < 2) throw DepthError("mult sequence: word too short");
  const Rational alpha = tab.value();

  Rational g = frac(config.gamma);
  if (g >= 1 - alpha) g -= 1;
  const auto enc = ostrowski::encode_real(g, word);

  std::vector<BigInt> prefix(static_cast<std::size_t>(J + 1));
  prefix[0] = 0;
  for (int k = 1; k <= J; ++k)
    prefix[static_cast<std::size_t>(k)] = prefix[static_cast<std::size_t>(k - 1)] + enc.b[static_cast<std::size_t>(k - 1)] * tab.den(k - 1);

  const BigInt& qJm1 = tab.den(J - 1);
  const BigInt qJ2 = tab.den(J) * tab.den(J);
  int K = 0;
  for (int k = 1; k < J; ++k)
    if (BigInt(kDepthFactor) * (prefix[static_cast<std::size_t>(k)] + tab.den(k)) <= qJm1) K = k;
  if (K == 0) throw DepthError("mult sequence: no usable cutoff at this depth");

  MultSequence seq;
  seq.word = word;
  seq.gamma = config.gamma;
  seq.C = config.C();

  for (int s = 1; s <= K; ++s) {
    std::vector<MultTerm> terms;
    bool ok = true;
    for (int t = 1; s * t <= K && ok; ++t) {
      MultTerm m;
      m.t = t;
      m.cutoff = s * t;
      m.n = prefix[static_cast<std::size_t>(m.cutoff)] + tab.den(m.cutoff);
      m.dist = dist_to_int(m.n * alpha - config.gamma);
      m.residual = make_rational(m.n, qJ2);
      m.rate_ok = (m.dist + m.residual) * m.n <= 8;
      m.lower_ok = pow_big(8, static_cast<unsigned long>(t)) < m.n;
      m.upper_ok = upper_growth_ok(m.n, seq.C, t);
      ok = m.rate_ok && m.lower_ok && m.upper_ok && (terms.empty() || m.n > terms.back().n);
      terms.push_back(std::move(m));
    }
    if (ok && !terms.empty()) {
      seq.stride = s;
      seq.terms = std::move(terms);
      seq.certified = true;
      return seq;
    }
  }
  throw DepthError("mult sequence: cannot satisfy both constraints at available depth");
}

bool verify_mult_certificates(const MultSequence& seq) {
  if (seq.terms.empty()) return false;
  const Rational alpha = contfrac::nested_value(seq.word);
  const BigInt qJ = alpha.get_den();
  const BigInt L = lcm_of(qJ, seq.gamma.get_den());
  const BigInt A = alpha.get_num() * (L / qJ);
  const BigInt G = seq.gamma.get_num() * (L / seq.gamma.get_den());
  const BigInt qJ2 = qJ * qJ;
  BigInt prev = 0;
  for (const auto& m : seq.terms) {
    if (m.n <= prev) return false;
    prev = m.n;
    BigInt r = mod_floor(m.n * A - G, L);
    BigInt d = L - r;
    if (r < d) d = r;
    // (d / L + n / q_J^2) n <= 8
    if ((d * qJ2 + m.n * L) * m.n > 8 * L * qJ2) return false;
    if (!(pow_big(8, static_cast<unsigned long>(m.t)) < m.n)) return false;
    if (!upper_growth_ok(m.n, seq.C, m.t)) return false;
  }
  return true;
}

long MultCount::count_upto(long h) const {
  return static_cast<long>(std::upper_bound(hits.begin(), hits.end(), h) - hits.begin());
}

namespace {

// r_n = (n x - y) mod L for x = num/den, y = shift, stepped in n.
class ResidueStepper {
 public:
  ResidueStepper(const Rational& x, const Rational& y) {
    L_ = lcm_of(x.get_den(), y.get_den());
    A_ = mod_floor(x.get_num() * (L_ / x.get_den()), L_);
    r_ = mod_floor(-(y.get_num() * (L_ / y.get_den())), L_);
    small_ = mpz_sizeinbase(L_.get_mpz_t(), 2) <= 125;
    if (small_) {
      Ls_ = to_u128(L_);
      As_ = to_u128(A_);
      rs_ = to_u128(r_);
      Lld_ = static_cast<long double>(Ls_);
    } else {
      Lld_ = ld_of(L_);
    }
  }

  void step() {
    if (small_) {
      rs_ += As_;
      if (rs_ >= Ls_) rs_ -= Ls_;
    } else {
      r_ += A_;
      if (r_ >= L_) r_ -= L_;
    }
  }

  // ||n x - y|| at the current n, to long double precision.
  long double dist() const {
    if (small_) {
      const unsigned __int128 d = std::min(rs_, Ls_ - rs_);
      return static_cast<long double>(d) / Lld_;
    }
    BigInt d = L_ - r_;
    if (r_ < d) d = r_;
    return ld_ratio(d, L_);
  }

 private:
  static unsigned __int128 to_u128(const BigInt& v) {
    BigInt hi = v >> 64;
    BigInt lo = v - (hi << 64);
    return (static_cast<unsigned __int128>(mpz_get_ui(hi.get_mpz_t())) << 64) | mpz_get_ui(lo.get_mpz_t());
  }

  BigInt L_, A_, r_;
  bool small_ = false;
  unsigned __int128 Ls_ = 0, As_ = 0, rs_ = 0;
  long double Lld_ = 1;
};

}  // namespace

MultCount count_mult_hits(const CFWord& alpha_word, const Rational& gamma, const SamplePoint& sample, long N) {
  if (N < 1) throw std::invalid_argument("littlewood: N must be >= 1");
  const contfrac::ConvergentTable tab(alpha_word);
  const int J = tab.depth();
  if (J < 2 || tab.den(J - 1) < BigInt(kDepthFactor) * N) throw DepthError("depth guard: alpha word q_{J-1} < 1e4 N");
  if (depth_of(sample) < BigInt(kDepthFactor) * N) throw DepthError("depth guard: sample q_{J-1} < 1e4 N");

  // tail allowances: |alpha - word value| <= 1/q_J^2; the sample carries n/q_J^2 + 1/q_J + n_b/q_J^2
  const long double lqa = log_big(tab.den(J));
  const bool has_res = sample.q_J != 0;
  const long double lqb = has_res ? log_big(sample.q_J) : 0;
  const long double nb_over = has_res && sample.n_b > 0 ? std::exp(static_cast<long double>(log_big(sample.n_b)) - 2 * lqb) : 0;

  const long double ea1 = std::exp(-2 * lqa);
  const long double eb1 = has_res ? std::exp(-2 * lqb) : 0;
  const long double eb0 = has_res ? std::exp(-lqb) + nb_over : 0;

  ResidueStepper ra(tab.value(), gamma), rb(sample.alpha, sample.gamma);
  MultCount out;
  out.N = N;
  constexpr long double kRel = 1e-12L;
  for (long n = 1; n <= N; ++n) {
    ra.step();
    rb.step();
    if (n < 2) continue;  // log 1 = 0: excluded
    const long double nn = static_cast<long double>(n);
    const long double da = ra.dist(), db = rb.dist();
    const long double ea = nn * ea1;
    const long double eb = nn * eb1 + eb0;
    const long double ln = std::log(nn);
    const long double hi = (da + ea) * (db + eb) * nn * ln * (1 + kRel);
    const long double lo = std::max<long double>(da - ea, 0) * std::max<long double>(db - eb, 0) * nn * ln * (1 - kRel);
    if (hi <= 1) {
      ++out.count;
      out.hits.push_back(n);
    } else if (lo <= 1) {
      ++out.ambiguous;
      out.ambiguous_n.push_back(n);
    }
  }
  return out;
}

}  // namespace badapprox::approx_lab
