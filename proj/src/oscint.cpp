#include "badapprox/oscint.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "badapprox/numeric.hpp"
#include "badapprox/parallel.hpp"

namespace badapprox::oscint {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRelTol = 1e-12;

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// 7-point Gauss weights at kXgk[1], [3], [5], [7]
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi;
};

std::complex<double> e_of(double phase) {
  // reduce to [-1/2, 1/2] before the trig call
  const double r = phase - std::round(phase);
  return std::polar(1.0, 2 * kPi * r);
}

void gk15(const std::function<double(double)>& F, double lo, double hi, std::complex<double>& k15, double& err) {
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  const std::complex<double> fc = e_of(F(c));
  std::complex<double> rk = fc * kWgk[7], rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[static_cast<std::size_t>(j)];
    const std::complex<double> s = e_of(F(c - dx)) + e_of(F(c + dx));
    rk += kWgk[static_cast<std::size_t>(j)] * s;
    if (j % 2 == 1) rg += kWg[static_cast<std::size_t>(j / 2)] * s;
  }
  k15 = rk * h;
  // |e(F)| = 1: roundoff floor of 50 eps per unit length
  err = std::abs((rk - rg) * h) + 100 * std::numeric_limits<double>::epsilon() * h;
}

double uniform_in(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }
double log_uniform(CounterRng& rng, double lo, double hi) {
  return std::exp(uniform_in(rng, std::log(lo), std::log(hi)));
}
double random_sign(CounterRng& rng) { return rng.below(2) ? 1.0 : -1.0; }

Poly random_poly(CounterRng& rng, int max_degree) {
  Poly p;
  const int d = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_degree + 1)));
  for (int i = 0; i <= d; ++i) p.c.push_back(uniform_in(rng, -1, 1));
  return p;
}

Poly scaled_shift(const Poly& p, double s, double c) {
  Poly out = p;
  if (out.c.empty()) out.c.push_back(0);
  out.c[0] += c;
  for (auto& x : out.c) x *= s;
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- Poly

double Poly::operator()(double t) const {
  double s = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * t + *it;
  return s;
}

Poly Poly::derivative() const {
  Poly d;
  for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * static_cast<double>(i));
  return d;
}

Poly Poly::antiderivative() const {
  Poly a;
  a.c.push_back(0);
  for (std::size_t i = 0; i < c.size(); ++i) a.c.push_back(c[i] / static_cast<double>(i + 1));
  return a;
}

std::vector<double> real_roots(const Poly& p, double lo, double hi) {
  Poly q = p;
  while (!q.c.empty() && q.c.back() == 0) q.c.pop_back();
  std::vector<double> out;
  if (q.c.size() <= 1) return out;
  double scale = 0;
  for (double x : q.c) scale += std::abs(x);
  const double flat = 1e-13 * scale;
  if (q.c.size() == 2) {
    const double r = -q.c[0] / q.c[1];
    if (r >= lo && r <= hi) out.push_back(r);
    return out;
  }
  std::vector<double> pts{lo};
  for (double r : real_roots(q.derivative(), lo, hi))
    if (r > lo && r < hi) pts.push_back(r);
  pts.push_back(hi);
  auto add = [&](double r) {
    if (out.empty() || std::abs(r - out.back()) > 1e-12) out.push_back(r);
  };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double u = pts[i], v = pts[i + 1];
    const double pu = q(u), pv = q(v);
    if (std::abs(pu) <= flat) {
      add(u);
      continue;
    }
    if (std::abs(pv) <= flat) continue;  // picked up as the next left end
    if ((pu < 0) != (pv < 0)) {
      double a = u, b = v;
      for (int it = 0; it < 200 && b - a > 0; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        if ((q(mid) < 0) == (pu < 0)) a = mid;
        else b = mid;
      }
      add(0.5 * (a + b));
    }
  }
  if (std::abs(q(hi)) <= flat) add(hi);
  return out;
}

AbsRange abs_range(const Poly& p, double lo, double hi, int grid) {
  AbsRange r;
  r.min = std::abs(p(lo));
  r.max = r.min;
  auto take = [&](double t) {
    const double v = std::abs(p(t));
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  };
  take(hi);
  for (double t : real_roots(p.derivative(), lo, hi)) take(t);
  for (int i = 1; i < grid; ++i) take(lo + (hi - lo) * i / grid);
  if (!real_roots(p, lo, hi).empty()) r.min = 0;
  return r;
}

// ---------------------------------------------------------------- quadrature

QuadResult quad_oscillatory(const std::function<double(double)>& F, double X, double Y, double tol) {
  if (!(tol >= 1e-10)) throw std::invalid_argument("quad: tol must be >= 1e-10");
  if (!(X <= Y)) throw std::invalid_argument("quad: need X <= Y");
  QuadResult out;
  if (X == Y) return out;

  // phase-variation panels, left to right
  std::vector<Panel> panels;
  std::vector<Panel> stack{{X, Y}};
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    double fmin = 1e300, fmax = -1e300;
    for (int i = 0; i <= 8; ++i) {
      const double v = F(p.lo + (p.hi - p.lo) * i / 8);
      fmin = std::min(fmin, v);
      fmax = std::max(fmax, v);
    }
    if (fmax - fmin < 0.25 || p.hi - p.lo < 1e-12 * (Y - X)) {
      panels.push_back(p);
      if (panels.size() > kPanelCap) throw GuardError("quad: subdivision cap");
      continue;
    }
    const double mid = 0.5 * (p.lo + p.hi);
    stack.push_back({mid, p.hi});
    stack.push_back({p.lo, mid});
  }

  // adaptive GK15 per panel, error budget proportional to length
  const double per_len = tol / (Y - X);
  std::size_t total = 0;
  for (const Panel& base : panels) {
    std::vector<Panel> work{base};
    while (!work.empty()) {
      const Panel p = work.back();
      work.pop_back();
      std::complex<double> v;
      double err = 0;
      gk15(F, p.lo, p.hi, v, err);
      if (err <= per_len * (p.hi - p.lo) || p.hi - p.lo < 1e-14 * (Y - X)) {
        out.value += v;
        out.error += err;
        ++total;
        if (total > kPanelCap) throw GuardError("quad: subdivision cap");
        continue;
      }
      const double mid = 0.5 * (p.lo + p.hi);
      work.push_back({mid, p.hi});
      work.push_back({p.lo, mid});
    }
  }
  out.panels = total;
  return out;
}

QuadResult quad_oscillatory(const Poly& F, double X, double Y, double tol) {
  return quad_oscillatory(std::function<double(double)>([&F](double t) { return F(t); }), X, Y, tol);
}

HalvingCheck halving_check(const Poly& F, double X, double Y, double tol) {
  HalvingCheck h;
  h.coarse = quad_oscillatory(F, X, Y, tol);
  h.fine = quad_oscillatory(F, X, Y, tol / 2);
  h.change = std::abs(h.fine.value - h.coarse.value);
  h.consistent = h.change <= h.coarse.error;
  return h;
}

// ---------------------------------------------------------------- lemmas

std::string lemma_name(LemmaId id) {
  switch (id) {
    case LemmaId::NonStationary: return "nonstationary";
    case LemmaId::VanDerCorput: return "vandercorput";
    case LemmaId::ExpInt: return "expint";
  }
  return {};
}

PhaseSpec PhaseSpec::exp_int(double A, double B, const Poly& G, double a, double b, int m, double X, double Y) {
  PhaseSpec s;
  s.lemma = LemmaId::ExpInt;
  s.A = A;
  s.B = B;
  s.G = G;
  s.a = a;
  s.b = b;
  s.m = m;
  s.X = X;
  s.Y = Y;
  // (A t + B) G
  Poly d;
  d.c.assign(G.c.size() + 1, 0.0);
  for (std::size_t i = 0; i < G.c.size(); ++i) {
    d.c[i] += B * G.c[i];
    d.c[i + 1] += A * G.c[i];
  }
  s.F = d.antiderivative();
  return s;
}

std::string PhaseSpec::describe() const {
  std::string out = "X=" + fmt(X) + " Y=" + fmt(Y);
  switch (lemma) {
    case LemmaId::NonStationary: out += " a=" + fmt(a) + " b=" + fmt(b); break;
    case LemmaId::VanDerCorput: out += " k=" + std::to_string(k) + " lambda=" + fmt(lambda); break;
    case LemmaId::ExpInt:
      out += " A=" + fmt(A) + " B=" + fmt(B) + " a=" + fmt(a) + " b=" + fmt(b) + " m=" + std::to_string(m);
      break;
  }
  out += " F=";
  for (std::size_t i = 0; i < F.c.size(); ++i) out += (i ? ";" : "") + fmt(F.c[i]);
  return out;
}

HypothesisReport check_hypothesis(const PhaseSpec& s) {
  auto fail = [](std::string why) { return HypothesisReport{false, std::move(why)}; };
  if (!(s.X <= s.Y)) return fail("X > Y");
  switch (s.lemma) {
    case LemmaId::NonStationary: {
      if (s.X < -1 || s.Y > 1) return fail("interval outside [-1,1]");
      if (!(s.a > 0) || s.b < 0) return fail("need a > 0, b >= 0");
      const Poly d1 = s.F.derivative(), d2 = d1.derivative();
      if (abs_range(d1, -1, 1).min < s.a * (1 - kRelTol)) return fail("|F'| < a somewhere on [-1,1]");
      if (abs_range(d2, -1, 1).max > s.b * (1 + kRelTol)) return fail("|F''| > b somewhere on [-1,1]");
      break;
    }
    case LemmaId::VanDerCorput: {
      if (s.k < 1) return fail("k must be >= 1");
      if (!(s.lambda > 0)) return fail("lambda must be > 0");
      if (!(s.X < s.Y)) return fail("empty interval");
      Poly dk = s.F;
      for (int i = 0; i < s.k; ++i) dk = dk.derivative();
      if (abs_range(dk, s.X, s.Y).min < s.lambda * (1 - kRelTol)) return fail("|F^(k)| < lambda on the interval");
      if (s.k == 1) {
        const Poly d2 = s.F.derivative().derivative();
        for (double r : real_roots(d2, s.X, s.Y)) {
          if (r <= s.X || r >= s.Y) continue;
          const double h = 1e-7 * (s.Y - s.X);
          if ((d2(r - h) < 0) != (d2(r + h) < 0)) return fail("F' not monotone");
        }
      }
      break;
    }
    case LemmaId::ExpInt: {
      if (s.X < 0 || s.Y > 1) return fail("interval outside [0,1]");
      if (s.A == 0) return fail("A must be nonzero");
      if (s.m < 1) return fail("m must be >= 1");
      if (s.a < 0 || s.a > s.m * s.b) return fail("need 0 <= a <= m b");
      if (abs_range(s.G, 0, 1).min < s.a * (1 - kRelTol)) return fail("|G| < a on [0,1]");
      if (abs_range(s.G.derivative(), 0, 1).max > s.b * (1 + kRelTol)) return fail("|G'| > b on [0,1]");
      const Poly f2 = s.F.derivative().derivative();
      if (static_cast<int>(real_roots(f2, 0, 1).size()) > s.m) return fail("f'' has more than m zeros");
      break;
    }
  }
  return {true, {}};
}

OscIntReport check_lemma_bounds(const PhaseSpec& s, double tol) {
  const auto h = check_hypothesis(s);
  if (!h.ok) throw std::invalid_argument("inadmissible instance: " + h.reason);
  OscIntReport r;
  r.lemma = s.lemma;
  r.params = s.describe();
  switch (s.lemma) {
    case LemmaId::NonStationary: r.bound = (1 / kPi) * (1 / s.a + s.b / (s.a * s.a)); break;
    case LemmaId::VanDerCorput: r.bound = 10.0 * s.k * std::pow(s.lambda, -1.0 / s.k); break;
    case LemmaId::ExpInt: {
      const double lhs = s.a > 0 ? s.b / (std::sqrt(std::abs(s.A)) * std::pow(s.a, 1.5)) : INFINITY;
      if (lhs < 1.0 / s.m) {
        r.bound = 10.0 * s.m * s.b / (std::pow(s.a, 1.5) * std::sqrt(std::abs(s.A)));
      } else {
        r.bound = 1;
        r.trivial = true;
      }
      break;
    }
  }
  const auto q = quad_oscillatory(s.F, s.X, s.Y, tol);
  r.observed = std::abs(q.value);
  r.quad_error = q.error;
  r.ratio = r.observed / r.bound;
  r.holds = r.observed <= r.bound;
  return r;
}

PhaseSpec random_instance(LemmaId lemma, CounterRng& rng) {
  PhaseSpec s;
  s.lemma = lemma;
  switch (lemma) {
    case LemmaId::NonStationary: {
      const Poly p = random_poly(rng, 3);
      const double M = abs_range(p, -1, 1).max;
      const Poly d1 = scaled_shift(p, random_sign(rng) * log_uniform(rng, 1, 1e3), M + log_uniform(rng, 0.01, 2));
      s.F = d1.antiderivative();
      s.F.c[0] = uniform_in(rng, -1, 1);
      s.a = abs_range(d1, -1, 1).min * (1 - 1e-9);
      s.b = abs_range(d1.derivative(), -1, 1).max * (1 + 1e-9);
      double u = uniform_in(rng, -1, 1), v = uniform_in(rng, -1, 1);
      s.X = std::min(u, v);
      s.Y = std::max(u, v);
      break;
    }
    case LemmaId::VanDerCorput: {
      s.k = 1 + static_cast<int>(rng.below(4));
      s.X = uniform_in(rng, 0, 0.5);
      s.Y = s.X + 0.05 + (1 - s.X - 0.05) * rng.uniform();
      Poly p = random_poly(rng, s.k == 1 ? 1 : 2);
      const double M = abs_range(p, s.X, s.Y).max;
      Poly dk = scaled_shift(p, random_sign(rng) * log_uniform(rng, 1, 1e4), M + log_uniform(rng, 0.01, 2));
      s.lambda = abs_range(dk, s.X, s.Y).min * (1 - 1e-9);
      Poly F = dk;
      for (int i = 0; i < s.k; ++i) F = F.antiderivative();
      for (int j = 0; j < s.k; ++j) F.c[static_cast<std::size_t>(j)] = uniform_in(rng, -5, 5);
      s.F = F;
      break;
    }
    case LemmaId::ExpInt: {
      const double A = random_sign(rng) * log_uniform(rng, 1, 1e4);
      const double B = -A * uniform_in(rng, -0.5, 1.5);
      const Poly p = random_poly(rng, 2);
      const double M = abs_range(p, 0, 1).max;
      const Poly G = scaled_shift(p, random_sign(rng) * log_uniform(rng, 0.5, 5), M + log_uniform(rng, 0.05, 2));
      const double a = abs_range(G, 0, 1).min * (1 - 1e-9);
      const double bG = abs_range(G.derivative(), 0, 1).max * (1 + 1e-9);
      PhaseSpec tmp = PhaseSpec::exp_int(A, B, G, a, bG, 1, 0, 1);
      const int zeros = static_cast<int>(real_roots(tmp.F.derivative().derivative(), 0, 1).size());
      const int m = std::max(1, zeros);
      const double b = std::max(bG, a / m);
      double u = rng.uniform(), v = rng.uniform();
      s = PhaseSpec::exp_int(A, B, G, a, b, m, std::min(u, v), std::max(u, v));
      break;
    }
  }
  return s;
}

SweepReport sweep(LemmaId lemma, std::size_t n, std::uint64_t seed, int threads, double tol) {
  SweepReport out;
  out.lemma = lemma;
  out.instances = n;
  out.reports.resize(n);
  parallel_chunks(n, 1, threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      CounterRng rng(seed, i);
      out.reports[i] = check_lemma_bounds(random_instance(lemma, rng), tol);
    }
  });
  for (const auto& r : out.reports) {
    if (!r.holds) ++out.violations;
    if (r.trivial) ++out.trivial;
    out.max_ratio = std::max(out.max_ratio, r.ratio);
  }
  return out;
}

}  // namespace badapprox::oscint
