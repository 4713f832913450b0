#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "badapprox/approx_lab.hpp"
#include "badapprox/cli.hpp"
#include "badapprox/contfrac.hpp"
#include "badapprox/kaufman.hpp"
#include "badapprox/oscint.hpp"
#include "badapprox/ostrowski.hpp"
#include "badapprox/symbolic.hpp"

namespace py = pybind11;
using namespace badapprox;

namespace {

py::object py_int(const BigInt& n) {
  return py::reinterpret_steal<py::object>(PyLong_FromString(to_string(n).c_str(), nullptr, 10));
}

py::object py_frac(const Rational& r) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(to_string(r));
}

// int, Fraction, str or float (by its repr, taken exactly as a decimal)
Rational to_rational(const py::handle& x) { return parse_rational(std::string(py::str(x))); }
BigInt to_bigint(const py::handle& x) { return parse_bigint(std::string(py::str(x))); }

contfrac::CFWord to_word(const py::handle& x) {
  if (py::isinstance<py::str>(x)) return contfrac::CFWord::parse(std::string(py::str(x)));
  return contfrac::CFWord(x.cast<std::vector<int>>());
}

py::dict sample_dict(const kaufman::SamplePoint& p) {
  py::dict d;
  d["alpha"] = py_frac(p.alpha);
  d["gamma"] = py_frac(p.gamma);
  d["a"] = p.words.a;
  d["b"] = p.words.b;
  d["J"] = p.J;
  d["q_J"] = py_int(p.q_J);
  d["res_alpha"] = p.res_alpha;
  d["res_gamma"] = p.res_gamma;
  d["attempts"] = p.attempts;
  return d;
}

oscint::LemmaId lemma_id(const std::string& s) {
  if (s == "ns") return oscint::LemmaId::NonStationary;
  if (s == "vdc") return oscint::LemmaId::VanDerCorput;
  if (s == "expint") return oscint::LemmaId::ExpInt;
  throw std::invalid_argument("lemma must be ns, vdc or expint");
}

}  // namespace

PYBIND11_MODULE(_badapprox, m) {
  m.doc() = "Exact continued fractions, Ostrowski digits, Kaufman measures and counting experiments";

  py::register_exception<DepthError>(m, "DepthError");
  py::register_exception<GuardError>(m, "GuardError");

  // contfrac
  m.def("convergents", [](const py::object& word) {
    auto w = to_word(word);
    auto t = contfrac::convergents(w);
    py::list out;
    for (int k = 0; k <= t.depth(); ++k) out.append(py::make_tuple(py_int(t.num(k)), py_int(t.den(k))));
    return out;
  }, py::arg("word"), "(p_k, q_k) for k = 0..J");
  m.def("value", [](const py::object& word) { return py_frac(contfrac::nested_value(to_word(word))); },
        py::arg("word"));
  m.def("identity_suite", [](const py::object& word) {
    py::dict d;
    for (const auto& [n, v] : contfrac::identity_suite(to_word(word)).items()) d[py::str(n)] = v;
    return d;
  }, py::arg("word"));

  // ostrowski
  m.def("encode_int", [](const py::object& n, const py::object& word) {
    return ostrowski::encode_int(to_bigint(n), to_word(word)).c;
  }, py::arg("n"), py::arg("word"));
  m.def("encode_real", [](const py::object& gamma, const py::object& word, bool positive_lead) {
    auto d = ostrowski::encode_real(to_rational(gamma), to_word(word),
                                    positive_lead ? ostrowski::LeadingDigit::Positive
                                                  : ostrowski::LeadingDigit::AllowZero);
    return py::make_tuple(d.b, py_frac(d.residual));
  }, py::arg("gamma"), py::arg("word"), py::arg("positive_lead") = false, "(digits, residual)");
  m.def("nag_evaluate", [](const py::object& n, const py::object& word, const py::object& gamma) {
    auto r = ostrowski::nag_evaluate(to_bigint(n), to_word(word), to_rational(gamma));
    py::dict d;
    d["m"] = r.m;
    d["delta"] = r.delta;
    d["S"] = py_frac(r.S);
    d["dist"] = py_frac(r.dist);
    d["residual"] = py_frac(r.residual);
    d["bound_B"] = r.bound_B;
    d["lemma_equality"] = r.lemma_equality;
    d["sign_claim"] = r.sign_claim;
    d["corollary_bound"] = r.corollary_bound;
    d["degenerate"] = r.degenerate;
    return d;
  }, py::arg("n"), py::arg("word"), py::arg("gamma"));

  // symbolic
  m.def("count_V", [](const py::object& word, int R) {
    py::list out;
    for (const auto& v : symbolic::count_V(to_word(word), R).v) out.append(py_int(v));
    return out;
  }, py::arg("word"), py::arg("R"), "v_1 .. v_m");
  m.def("enumerate_V", [](const py::object& word, int R) { return symbolic::enumerate_V(to_word(word), R); },
        py::arg("word"), py::arg("R"));

  // kaufman
  m.def("exponents", [](int M, int R, int mm, std::optional<double> kappa) {
    auto e = kaufman::exponents(*kaufman::block_table(M, R, mm), kappa);
    py::dict d;
    d["kappa"] = e.kappa;
    d["T_m"] = e.T_m;
    d["sigma_m"] = e.sigma_m;
    d["kappa_star"] = e.kappa_star;
    d["omega"] = e.omega;
    return d;
  }, py::arg("M"), py::arg("R"), py::arg("m"), py::arg("kappa") = py::none());

  py::class_<kaufman::Measure>(m, "Measure")
      .def(py::init([](int M, int R, int mm, double kappa, double eps, int j0, std::uint64_t seed, bool cond) {
             kaufman::MeasureParams p{M, R, mm, kappa, eps, j0, seed, cond};
             p.validate();
             return kaufman::Measure(p);
           }),
           py::arg("M") = 2, py::arg("R") = 3, py::arg("m") = 3, py::arg("kappa") = 0.6, py::arg("eps") = 0.2,
           py::arg("j0") = 1, py::arg("seed") = 0, py::arg("conditioning") = true)
      .def_property_readonly("T", &kaufman::Measure::T)
      .def_property_readonly("kappa_star", &kaufman::Measure::kappa_star)
      .def_property_readonly("prob_E", &kaufman::Measure::prob_E)
      .def("conformance", [](const kaufman::Measure& mu) {
        py::dict d;
        for (const auto& [n, v] : mu.conformance().items) d[py::str(n)] = v;
        return d;
      })
      .def("sample", [](const kaufman::Measure& mu, std::uint64_t stream, int N) {
        return sample_dict(mu.sample_point(stream, N));
      }, py::arg("stream"), py::arg("N") = 1)
      .def("cylinder_measure", [](const kaufman::Measure& mu, std::vector<int> a, std::vector<int> b) {
        auto c = mu.cylinder_measure(kaufman::CylinderId{std::move(a), std::move(b)});
        py::dict d;
        d["measure"] = c.measure;
        d["lower"] = c.lower;
        d["upper"] = c.upper;
        d["sandwich"] = c.sandwich;
        d["in_E"] = c.in_E;
        return d;
      }, py::arg("a"), py::arg("b"))
      .def("fourier", [](const kaufman::Measure& mu, const std::vector<std::pair<long, long>>& ks, std::size_t S,
                         int threads) {
        py::gil_scoped_release release;
        auto run = kaufman::fourier_estimate(mu, ks, S, threads);
        std::vector<std::pair<std::complex<double>, double>> out;
        for (const auto& e : run.estimates) out.emplace_back(e.value, e.stderr_);
        return out;
      }, py::arg("ks"), py::arg("S"), py::arg("threads") = 1, "[(value, stderr)] per frequency");

  // approx-lab
  m.def("window_coeff", [](long q, double eps, double psi_q, bool plus, long k1, long k2) {
    approx_lab::WindowSpec s{q, eps, psi_q, plus ? approx_lab::WindowSign::Plus : approx_lab::WindowSign::Minus};
    s.validate();
    return approx_lab::window_coeff(s, k1, k2);
  }, py::arg("q"), py::arg("eps"), py::arg("psi_q"), py::arg("plus"), py::arg("k1"), py::arg("k2"));
  m.def("mult_sequence", [](const py::object& word, const py::object& gamma) {
    approx_lab::MultConfig c{to_word(word), to_rational(gamma)};
    auto seq = approx_lab::build_mult_sequence(c);
    py::list out;
    for (const auto& t : seq.terms) out.append(py_int(t.n));
    return py::make_tuple(out, approx_lab::verify_mult_certificates(seq));
  }, py::arg("word"), py::arg("gamma") = 0, "(terms, certified)");

  // oscint
  m.def("quad_oscillatory", [](std::vector<double> coeffs, double X, double Y, double tol) {
    auto r = oscint::quad_oscillatory(oscint::Poly{std::move(coeffs)}, X, Y, tol);
    return py::make_tuple(r.value, r.error);
  }, py::arg("coeffs"), py::arg("X"), py::arg("Y"), py::arg("tol") = 1e-9, "int_X^Y e(F) dt for polynomial F");
  m.def("oscint_sweep", [](const std::string& lemma, std::size_t n, std::uint64_t seed, int threads) {
    oscint::SweepReport r;
    {
      py::gil_scoped_release release;
      r = oscint::sweep(lemma_id(lemma), n, seed, threads);
    }
    py::dict d;
    d["instances"] = r.instances;
    d["violations"] = r.violations;
    d["trivial"] = r.trivial;
    d["max_ratio"] = r.max_ratio;
    return d;
  }, py::arg("lemma"), py::arg("n"), py::arg("seed"), py::arg("threads") = 1);

  // cli
  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "(exit code, stdout, stderr)");
}
