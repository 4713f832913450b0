#include "doctest.h"

#include <cmath>
#include <numbers>

#include "badapprox/numeric.hpp"
#include "badapprox/oscint.hpp"

using namespace badapprox;
using namespace badapprox::oscint;

namespace {

const double kPi = std::numbers::pi;

// int_0^1 exp(2 pi i t^2) dt = sum_n (2 pi i)^n / (n! (2n + 1))
std::complex<double> fresnel_series() {
  std::complex<double> term = 1, sum = 0;
  const std::complex<double> z(0, 2 * kPi);
  for (int n = 0; n < 80; ++n) {
    if (n > 0) term *= z / static_cast<double>(n);
    sum += term / static_cast<double>(2 * n + 1);
  }
  return sum;
}

std::complex<double> linear_closed(double c, double X, double Y) {
  const std::complex<double> i(0, 1);
  return (std::exp(2 * kPi * i * c * Y) - std::exp(2 * kPi * i * c * X)) / (2 * kPi * i * c);
}

}  // namespace

TEST_CASE("polynomial helpers") {
  Poly p{{-6, 11, -6, 1}};  // (t-1)(t-2)(t-3)
  auto r = real_roots(p, 0, 4);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(1).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(2).epsilon(1e-12));
  CHECK(r[2] == doctest::Approx(3).epsilon(1e-12));
  CHECK(real_roots(p, 1.5, 2.5).size() == 1);
  CHECK(real_roots(Poly{{1, 0, 1}}, -5, 5).empty());
  CHECK(real_roots(Poly{{0, 0, 1}}, -1, 1).size() == 1);  // double root
  auto d = p.derivative();
  CHECK(d.c == std::vector<double>{11, -12, 3});
  auto a = d.antiderivative();
  CHECK(a(2.5) - a(0.5) == doctest::Approx(p(2.5) - p(0.5)));
  auto ar = abs_range(Poly{{1, -2, 1}}, 0, 3);  // (t-1)^2
  CHECK(ar.min == 0.0);
  CHECK(ar.max == doctest::Approx(4));
}

TEST_CASE("quadrature: trivial phases") {
  CHECK(std::abs(quad_oscillatory(Poly{{0}}, 0, 1, 1e-10).value - 1.0) < 1e-12);
  CHECK(std::abs(quad_oscillatory(Poly{{0, 1}}, 0, 1, 1e-10).value) < 1e-12);
  CHECK(std::abs(quad_oscillatory(Poly{{0, 7}}, 0, 1, 1e-10).value) < 1e-12);
}

TEST_CASE("quadrature: Fresnel value against the power series") {
  const auto ref = fresnel_series();
  CHECK(ref.real() == doctest::Approx(0.2441267030).epsilon(1e-9));
  CHECK(ref.imag() == doctest::Approx(0.1717078392).epsilon(1e-9));
  auto q = quad_oscillatory(Poly{{0, 0, 1}}, 0, 1, 1e-10);
  CHECK(std::abs(q.value - ref) < 1e-10);
  CHECK(q.error <= 1e-10);
}

TEST_CASE("quadrature: linear phases against the closed form") {
  for (double c : {0.3, 12.5, 333.7, 5000.25})
    for (auto [X, Y] : {std::pair{0.0, 1.0}, std::pair{-0.7, 0.2}, std::pair{0.31, 0.97}}) {
      auto q = quad_oscillatory(Poly{{0.0, c}}, X, Y, 1e-10);
      CHECK(std::abs(q.value - linear_closed(c, X, Y)) < 1e-9);
    }
}

TEST_CASE("quadrature: halving the tolerance") {
  CounterRng rng(77, 0);
  for (auto L : {LemmaId::NonStationary, LemmaId::VanDerCorput, LemmaId::ExpInt})
    for (int i = 0; i < 30; ++i) {
      auto s = random_instance(L, rng);
      for (double tol : {1e-6, 1e-8}) {
        auto h = halving_check(s.F, s.X, s.Y, tol);
        CHECK(h.consistent);
        CHECK(h.coarse.error <= tol);
      }
    }
}

TEST_CASE("quadrature errors") {
  CHECK_THROWS_AS(quad_oscillatory(Poly{{0, 1}}, 0, 1, 1e-12), std::invalid_argument);
  CHECK_THROWS_AS(quad_oscillatory(Poly{{0, 1}}, 1, 0, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(quad_oscillatory(Poly{{0, 1e12}}, 0, 1, 1e-10), GuardError);
}

TEST_CASE("non-stationary phase example") {
  PhaseSpec s;
  s.lemma = LemmaId::NonStationary;
  s.F = Poly{{0, 100}};
  s.X = -1;
  s.Y = 1;
  s.a = 100;
  s.b = 0;
  auto r = check_lemma_bounds(s);
  CHECK(r.bound == doctest::Approx(1 / (100 * kPi)));
  CHECK(r.observed < 1e-12);
  CHECK(r.holds);
  // half-integer number of cycles attains the constant
  s.F = Poly{{0, 2.5}};
  s.a = 2.5;
  s.X = 0;
  s.Y = 1;
  r = check_lemma_bounds(s);
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("van der Corput example") {
  PhaseSpec s;
  s.lemma = LemmaId::VanDerCorput;
  s.k = 2;
  s.lambda = 100;
  s.F = Poly{{0, 0, 50}};
  s.X = 0;
  s.Y = 1;
  auto r = check_lemma_bounds(s);
  CHECK(r.bound == doctest::Approx(2.0));
  CHECK(r.observed == doctest::Approx(0.0489).epsilon(1e-2));
  CHECK(r.holds);
}

TEST_CASE("ExpInt example") {
  auto s = PhaseSpec::exp_int(100, 0, Poly{{2, 1}}, 2, 1, 2, 0, 1);
  CHECK(s.F.c == std::vector<double>{0, 0, 100, 100.0 / 3});
  auto r = check_lemma_bounds(s);
  CHECK_FALSE(r.trivial);
  CHECK(r.bound == doctest::Approx(10 * 2 * 1 / (std::pow(2.0, 1.5) * 10)));
  CHECK(r.observed == doctest::Approx(0.0357).epsilon(1e-2));
  CHECK(r.ratio < 0.1);
  // small |A|: rhs not small, trivial bound 1
  auto t = PhaseSpec::exp_int(0.1, 0, Poly{{2, 1}}, 2, 1, 2, 0, 1);
  auto rt = check_lemma_bounds(t);
  CHECK(rt.trivial);
  CHECK(rt.bound == 1.0);
  CHECK(rt.holds);
}

TEST_CASE("inadmissible instances are rejected") {
  PhaseSpec s;
  s.lemma = LemmaId::NonStationary;
  s.F = Poly{{0, 0, 1}};  // F' = 2t vanishes
  s.a = 0.5;
  s.b = 2;
  s.X = 0;
  s.Y = 1;
  CHECK_FALSE(check_hypothesis(s).ok);
  CHECK_THROWS_WITH_AS(check_lemma_bounds(s), doctest::Contains("inadmissible instance"), std::invalid_argument);

  PhaseSpec v;
  v.lemma = LemmaId::VanDerCorput;
  v.k = 1;
  v.lambda = 0.5;
  v.F = Poly{{0, 1, 0, 1}};  // F' = 1 + 3t^2, not monotone on (-1, 1)
  v.X = -1;
  v.Y = 1;
  CHECK_FALSE(check_hypothesis(v).ok);
  v.X = 0.1;
  CHECK(check_hypothesis(v).ok);

  auto e = PhaseSpec::exp_int(100, 0, Poly{{2, 1}}, 2, 0.5, 2, 0, 1);  // |G'| = 1 > b
  CHECK_FALSE(check_hypothesis(e).ok);
  auto e2 = PhaseSpec::exp_int(100, 0, Poly{{2, 1}}, 2, 1, 1, 0, 1);  // a = 2 > m b = 1
  CHECK_FALSE(check_hypothesis(e2).ok);
}

TEST_CASE("random sweeps: no violations, thread-independent") {
  for (auto L : {LemmaId::NonStationary, LemmaId::VanDerCorput, LemmaId::ExpInt}) {
    auto a = sweep(L, 150, 2024, 1);
    auto b = sweep(L, 150, 2024, 3);
    CHECK(a.violations == 0);
    CHECK(a.max_ratio == b.max_ratio);
    for (std::size_t i = 0; i < a.reports.size(); ++i) {
      CHECK(a.reports[i].observed == b.reports[i].observed);
      CounterRng rng(2024, i);
      CHECK(check_hypothesis(random_instance(L, rng)).ok);
    }
  }
}
