#include "badapprox/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "badapprox/approx_lab.hpp"
#include "badapprox/contfrac.hpp"
#include "badapprox/kaufman.hpp"
#include "badapprox/numeric.hpp"
#include "badapprox/oscint.hpp"
#include "badapprox/ostrowski.hpp"
#include "badapprox/parallel.hpp"
#include "badapprox/symbolic.hpp"

namespace badapprox::cli {
namespace {

using json = nlohmann::ordered_json;
using contfrac::CFWord;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

json jnum(double x) { return std::isfinite(x) ? json(x) : json(num(x)); }

std::string yes(bool b) { return b ? "true" : "false"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Report {
  json config = json::object();
  std::vector<std::pair<std::string, bool>> items;
  std::vector<std::string> required;
  json results = json::object();
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void check(const std::string& name, bool ok, bool req = true) {
    items.emplace_back(name, ok);
    if (req) required.push_back(name);
  }

  bool passed() const {
    for (const auto& name : required)
      for (const auto& [n, v] : items)
        if (n == name && !v) return false;
    return true;
  }

  json conformance() const {
    json c;
    json it = json::object();
    for (const auto& [n, v] : items) it[n] = v;
    c["items"] = it;
    c["required"] = required;
    c["passed"] = passed();
    return c;
  }

  std::string to_json() const {
    json j;
    j["config"] = config;
    j["conformance"] = conformance();
    j["results"] = results;
    return j.dump(2) + "\n";
  }

  std::string to_csv() const {
    std::ostringstream os;
    for (const auto& [k, v] : config.items()) os << "# config." << k << "=" << v.dump() << "\n";
    for (const auto& [n, v] : items) os << "# conformance." << n << "=" << yes(v) << "\n";
    os << "# conformance.passed=" << yes(passed()) << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(header[i]);
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
      os << "\n";
    }
    return os.str();
  }
};

struct Options {
  // measure
  int M = 2, R = 3, m = 3;
  double kappa = 0.6, eps = 0.2;
  int j0 = 1;
  bool no_condition = false;
  std::uint64_t seed = 0;
  int threads = 0;
  std::size_t samples = 0;
  int depth = 1;
  std::string out_json, out_csv, config;

  std::string word, n, gamma, lead = "zero", tau, b;
  std::size_t count = 0;
  int max_len = 40;
  double precision = 0;
  std::vector<std::string> k;
  std::string radii = "0.005,0.01,0.02,0.05,0.1,0.2";
  std::size_t probes = 64;
  std::string seq = "geom:2,2", psi = "power:0.4,0.6";
  int N = 500;
  double band = 0.35;
  std::string alpha = "2x60", Ns = "1000,31623,1000000";
  std::string lemma = "all";
  double tol = 1e-9;

  std::function<bool(const std::string&)> given;  // whether a flag was set
  bool has(const std::string& flag) const { return given && given(flag); }
  int thread_count() const { return threads > 0 ? threads : default_threads(); }
};

void require_seed(const Options& o) {
  if (!o.has("--seed")) throw std::invalid_argument("flag --seed: required for randomized subcommands");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& flag) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument("flag " + flag + ": bad number '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& flag) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument("flag " + flag + ": bad integer '" + s + "'");
  return v;
}

// ---------------------------------------------------------------- measure

kaufman::MeasureParams measure_params(const Options& o) {
  kaufman::MeasureParams p;
  p.M = o.M;
  p.R = o.R;
  p.m = o.m;
  p.kappa = o.kappa;
  p.epsilon = o.eps;
  p.j0 = o.j0;
  p.seed = o.seed;
  p.conditioning = !o.no_condition;
  p.validate();
  return p;
}

void echo_measure(const Options& o, json& c) {
  c["M"] = o.M;
  c["R"] = o.R;
  c["m"] = o.m;
  c["kappa"] = o.kappa;
  c["eps"] = o.eps;
  c["j0"] = o.j0;
  c["conditioning"] = !o.no_condition;
}

// Hypotheses of the asymptotic statements; reported, not required.
void measure_items(const kaufman::Measure& mu, Report& r) {
  for (const auto& [n, v] : mu.conformance().items) r.check("measure." + n, v, false);
  json m;
  m["T_m"] = jnum(mu.T());
  m["sigma_m"] = jnum(mu.sigma());
  m["kappa_star"] = jnum(mu.kappa_star());
  m["P_E"] = jnum(mu.prob_E());
  m["P_E_exact"] = mu.prob_E_exact();
  r.results["measure"] = m;
}

// ---------------------------------------------------------------- subcommands

void run_identities(const Options& o, Report& r) {
  std::vector<CFWord> words;
  if (!o.word.empty()) {
    words.push_back(CFWord::parse(o.word));
    r.config["word"] = o.word;
  } else {
    require_seed(o);
    if (o.count < 1) throw std::invalid_argument("flag --count: need --word or --count >= 1");
    if (o.max_len < 2) throw std::invalid_argument("flag --max-len: must be >= 2");
    if (o.M < 1) throw std::invalid_argument("flag --M: must be >= 1");
    for (std::size_t i = 0; i < o.count; ++i) {
      CounterRng rng(o.seed, i);
      const std::size_t len = 2 + rng.below(static_cast<std::uint64_t>(o.max_len - 1));
      std::vector<int> a(len);
      for (auto& x : a) x = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(o.M)));
      words.emplace_back(std::move(a), o.M);
    }
    r.config["count"] = o.count;
    r.config["max_len"] = o.max_len;
    r.config["M"] = o.M;
    r.config["seed"] = o.seed;
  }
  std::vector<contfrac::IdentityReport> reps(words.size());
  parallel_chunks(words.size(), 8, o.thread_count(), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) reps[i] = contfrac::identity_suite(words[i]);
  });
  const auto names = reps.front().items();
  r.header = {"index", "word"};
  for (const auto& [n, v] : names) r.header.push_back(n);
  std::vector<long> violations(names.size(), 0);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), words[i].to_string()};
    const auto it = reps[i].items();
    for (std::size_t j = 0; j < it.size(); ++j) {
      row.push_back(yes(it[j].second));
      if (!it[j].second) ++violations[j];
    }
    r.rows.push_back(std::move(row));
  }
  json v = json::object();
  for (std::size_t j = 0; j < names.size(); ++j) {
    v[names[j].first] = violations[j];
    r.check(names[j].first, violations[j] == 0);
  }
  r.results["words"] = words.size();
  r.results["violations"] = v;
}

void run_ostrowski(const Options& o, Report& r) {
  if (o.word.empty()) throw std::invalid_argument("flag --word: required");
  if (o.n.empty() && o.gamma.empty()) throw std::invalid_argument("flag --n/--gamma: at least one is required");
  if (o.lead != "zero" && o.lead != "positive") throw std::invalid_argument("flag --lead: zero or positive");
  const auto word = CFWord::parse(o.word);
  r.config["word"] = o.word;
  r.header = {"kind", "k", "digit"};
  if (!o.n.empty()) {
    const BigInt n = parse_bigint(o.n);
    r.config["n"] = to_string(n);
    auto enc = ostrowski::encode_int(n, word);
    const BigInt back = ostrowski::decode(enc);
    r.check("integer_round_trip", back == n);
    json j;
    j["digits"] = enc.c;
    j["K"] = enc.K;
    j["decoded"] = to_string(back);
    r.results["integer"] = j;
    for (std::size_t k = 0; k < enc.c.size(); ++k) r.rows.push_back({"c", std::to_string(k + 1), std::to_string(enc.c[k])});
  }
  if (!o.gamma.empty()) {
    const Rational gamma = parse_rational(o.gamma);
    const auto lead = o.lead == "positive" ? ostrowski::LeadingDigit::Positive : ostrowski::LeadingDigit::AllowZero;
    r.config["gamma"] = to_string(gamma);
    r.config["lead"] = o.lead;
    auto enc = ostrowski::encode_real(gamma, word, lead);
    const Rational back = ostrowski::decode(enc);
    r.check("digits_legal", ostrowski::digits_legal(word, enc.b, lead));
    r.check("real_round_trip", back + enc.residual == gamma);
    json j;
    j["digits"] = enc.b;
    j["residual"] = to_string(enc.residual);
    j["residual_approx"] = jnum(to_double(enc.residual));
    r.results["real"] = j;
    for (std::size_t k = 0; k < enc.b.size(); ++k) r.rows.push_back({"b", std::to_string(k + 1), std::to_string(enc.b[k])});
  }
  if (!o.n.empty() && !o.gamma.empty()) {
    std::optional<Rational> tau;
    if (!o.tau.empty()) {
      tau = parse_rational(o.tau);
      r.config["tau"] = to_string(*tau);
    }
    auto nag = ostrowski::nag_evaluate(parse_bigint(o.n), word, parse_rational(o.gamma), tau);
    r.check("lemma_equality", nag.lemma_equality);
    r.check("sign_claim", nag.sign_claim);
    r.check("corollary_bound", nag.corollary_bound);
    json j;
    j["m"] = nag.m;
    j["delta"] = nag.delta;
    j["S"] = to_string(nag.S);
    j["dist"] = to_string(nag.dist);
    j["dist_approx"] = jnum(to_double(nag.dist));
    j["dist_from_S"] = to_string(nag.dist_from_S);
    j["bound_B"] = nag.bound_B;
    j["degenerate"] = nag.degenerate;
    r.results["nag"] = j;
  }
}

void run_symbolic(const Options& o, Report& r) {
  if (o.word.empty()) throw std::invalid_argument("flag --word: required");
  const auto word = CFWord::parse(o.word);
  r.config["word"] = o.word;
  r.config["R"] = o.R;
  auto tab = symbolic::count_V(word, o.R);
  const auto conv = contfrac::convergents(word);
  r.header = {"k", "a_k", "v_k", "n_k", "q_k", "hypothesis"};
  for (std::size_t k = 1; k <= word.length(); ++k)
    r.rows.push_back({std::to_string(k), std::to_string(word.quotient(k)), to_string(tab.v[k - 1]),
                      std::to_string(tab.n_counts[k - 1]), to_string(conv.den(static_cast<int>(k))),
                      yes(tab.hypothesis(k))});
  r.check("sandwich", tab.sandwich_holds());
  const BigInt& v = tab.v.back();
  r.results["v_m"] = to_string(v);
  if (v <= symbolic::kEnumerateGuard) {
    const auto all = symbolic::enumerate_V(word, o.R);
    r.check("count_matches_enumeration", BigInt(static_cast<unsigned long>(all.size())) == v);
    r.results["enumerated"] = all.size();
  } else {
    r.results["enumerated"] = nullptr;
  }
  if (!o.b.empty()) {
    const auto b = parse_int_list(o.b);
    r.config["b"] = o.b;
    symbolic::DigitSpaceParams p;
    p.M = std::max(2, word.effective_cap());
    p.R = o.R;
    r.results["member"] = symbolic::check_membership(word, b, p);
  }
}

void run_exponents(const Options& o, Report& r) {
  r.config["M"] = o.M;
  r.config["R"] = o.R;
  r.config["m"] = o.m;
  std::optional<double> kappa;
  if (o.has("--kappa")) {
    kappa = o.kappa;
    r.config["kappa"] = o.kappa;
  }
  auto table = kaufman::block_table(o.M, o.R, o.m);
  auto e = kaufman::exponents(*table, kappa);
  r.check("kappa_star_root", std::abs(e.kappa_residual) <= 1e-9);
  r.check("omega_root", std::abs(e.omega_residual) <= 1e-9);
  json j;
  j["kappa"] = jnum(e.kappa);
  j["T_m"] = jnum(e.T_m);
  j["sigma_m"] = jnum(e.sigma_m);
  j["kappa_star"] = jnum(e.kappa_star);
  j["omega"] = jnum(e.omega);
  j["kappa_residual"] = jnum(e.kappa_residual);
  j["omega_residual"] = jnum(e.omega_residual);
  j["admissible_words"] = table->size();
  r.results = j;
  r.header = {"M", "R", "m", "kappa", "T_m", "sigma_m", "kappa_star", "omega"};
  r.rows.push_back({std::to_string(o.M), std::to_string(o.R), std::to_string(o.m), num(e.kappa), num(e.T_m),
                    num(e.sigma_m), num(e.kappa_star), num(e.omega)});
}

void run_sample(const Options& o, Report& r) {
  require_seed(o);
  kaufman::Measure mu(measure_params(o));
  const std::size_t S = o.samples ? o.samples : 10;
  if (o.depth < 1) throw std::invalid_argument("flag --depth: must be >= 1");
  echo_measure(o, r.config);
  r.config["seed"] = o.seed;
  r.config["samples"] = S;
  r.config["depth"] = o.depth;
  std::optional<double> precision;
  if (o.precision > 0) {
    precision = o.precision;
    r.config["precision"] = o.precision;
  }
  std::vector<kaufman::SamplePoint> pts(S);
  std::vector<kaufman::CylinderReport> cyl(S);
  parallel_chunks(S, 16, o.thread_count(), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      pts[i] = mu.sample_point(i, o.depth, precision);
      cyl[i] = mu.cylinder_measure(pts[i].words);
    }
  });
  measure_items(mu, r);
  r.header = {"stream", "J", "groups", "attempts", "alpha", "gamma", "alpha_approx", "gamma_approx",
              "log_q_J", "res_alpha", "res_gamma", "in_E", "q_sandwich", "q_prev_bound", "a", "b"};
  bool in_E = true, qs = true, qp = true;
  for (std::size_t i = 0; i < S; ++i) {
    const auto& p = pts[i];
    const auto& c = cyl[i];
    in_E &= c.in_E;
    qs &= c.q_sandwich;
    qp &= c.q_prev_bound;
    r.rows.push_back({std::to_string(i), std::to_string(p.J), std::to_string(p.groups), std::to_string(p.attempts),
                      to_string(p.alpha), to_string(p.gamma), num(to_double(p.alpha)), num(to_double(p.gamma)),
                      num(log_big(p.q_J)), num(p.res_alpha), num(p.res_gamma), yes(c.in_E), yes(c.q_sandwich),
                      yes(c.q_prev_bound), join_ints(p.words.a), join_ints(p.words.b)});
  }
  const bool cond = !o.no_condition;
  r.check("samples_in_E", in_E, cond);
  r.check("q_sandwich_all", qs, cond);
  r.check("q_prev_bound_all", qp, cond);
  r.results["samples"] = S;
}

void run_cylinders(const Options& o, Report& r) {
  if (o.j0 >= 3) require_seed(o);
  kaufman::Measure mu(measure_params(o));
  if (o.depth < 1) throw std::invalid_argument("flag --depth: must be >= 1");
  echo_measure(o, r.config);
  if (o.j0 >= 3) r.config["seed"] = o.seed;
  r.config["depth"] = o.depth;
  const auto ids = mu.all_cylinders(o.depth);
  std::vector<kaufman::CylinderReport> reps(ids.size());
  parallel_chunks(ids.size(), 64, o.thread_count(), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) reps[i] = mu.cylinder_measure(ids[i]);
  });
  measure_items(mu, r);
  r.header = {"index", "a", "b", "measure", "lower", "upper", "sandwich", "in_E", "q_sandwich", "q_prev_bound"};
  double total = 0;
  bool sandwich = true, qs = true, qp = true;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& c = reps[i];
    total += c.measure;
    sandwich &= c.sandwich;
    if (c.in_E) {
      qs &= c.q_sandwich;
      qp &= c.q_prev_bound;
    }
    r.rows.push_back({std::to_string(i), join_ints(ids[i].a), join_ints(ids[i].b), num(c.measure), num(c.lower),
                      num(c.upper), yes(c.sandwich), yes(c.in_E), yes(c.q_sandwich), yes(c.q_prev_bound)});
  }
  const bool cond = !o.no_condition;
  r.check("measure_sum", std::abs(total - 1) <= 1e-12);
  r.check("sandwich_all", sandwich);
  r.check("q_sandwich_all", qs, cond);
  r.check("q_prev_bound_all", qp, cond);
  r.results["cylinders"] = ids.size();
  r.results["total"] = jnum(total);
}

std::vector<std::pair<long, long>> parse_frequencies(const std::vector<std::string>& items) {
  std::vector<std::pair<long, long>> ks;
  for (const auto& item : items)
    for (const auto& pair : split(item, ';')) {
      auto parts = split(pair, ',');
      if (parts.size() != 2) throw std::invalid_argument("flag --k: expected k1,k2 but got '" + pair + "'");
      ks.emplace_back(parse_long(parts[0], "--k"), parse_long(parts[1], "--k"));
    }
  if (ks.empty()) throw std::invalid_argument("flag --k: no frequencies");
  return ks;
}

void run_fourier(const Options& o, Report& r) {
  require_seed(o);
  kaufman::Measure mu(measure_params(o));
  const std::size_t S = o.samples ? o.samples : 100000;
  const auto ks = parse_frequencies(o.k.empty() ? std::vector<std::string>{"64,0"} : o.k);
  echo_measure(o, r.config);
  r.config["seed"] = o.seed;
  r.config["samples"] = S;
  json kj = json::array();
  for (auto [a, b] : ks) kj.push_back({a, b});
  r.config["k"] = kj;
  auto run = kaufman::fourier_estimate(mu, ks, S, o.thread_count());
  measure_items(mu, r);
  r.header = {"k1", "k2", "re", "im", "abs", "stderr", "S"};
  json est = json::array();
  for (const auto& e : run.estimates) {
    r.rows.push_back({std::to_string(e.k1), std::to_string(e.k2), num(e.value.real()), num(e.value.imag()),
                      num(std::abs(e.value)), num(e.stderr_), std::to_string(e.S)});
    json j;
    j["k"] = {e.k1, e.k2};
    j["re"] = jnum(e.value.real());
    j["im"] = jnum(e.value.imag());
    j["abs"] = jnum(std::abs(e.value));
    j["stderr"] = jnum(e.stderr_);
    est.push_back(j);
  }
  r.results["estimates"] = est;
  r.results["precision"] = jnum(run.precision);
  r.results["mean_depth"] = jnum(run.mean_depth);
  r.results["max_depth"] = run.max_depth;
  r.results["acceptance_rate"] = jnum(run.acceptance_rate);
}

void run_frostman(const Options& o, Report& r) {
  require_seed(o);
  kaufman::Measure mu(measure_params(o));
  const std::size_t S = o.samples ? o.samples : 100000;
  std::vector<double> radii;
  for (const auto& s : split(o.radii, ',')) radii.push_back(parse_double(s, "--radii"));
  echo_measure(o, r.config);
  r.config["seed"] = o.seed;
  r.config["samples"] = S;
  r.config["radii"] = radii;
  r.config["probes"] = o.probes;
  auto rep = kaufman::frostman_scan(mu, S, radii, o.probes, o.thread_count());
  measure_items(mu, r);
  r.check("envelope_holds", rep.envelope_holds);
  r.header = {"radius", "max_mass", "envelope"};
  for (std::size_t i = 0; i < rep.profile.radii.size(); ++i) {
    const double rr = rep.profile.radii[i];
    r.rows.push_back({num(rr), num(rep.profile.max_mass[i]),
                      num(rep.envelope_c * std::pow(rr, rep.theoretical_exponent))});
  }
  r.results["max_mass"] = rep.profile.max_mass;
  r.results["slope"] = jnum(rep.profile.slope);
  r.results["theoretical_exponent"] = jnum(rep.theoretical_exponent);
  r.results["envelope_c"] = jnum(rep.envelope_c);
}

void run_lacunary(const Options& o, Report& r) {
  require_seed(o);
  kaufman::Measure mu(measure_params(o));
  approx_lab::LacunaryConfig cfg;
  cfg.sequence = approx_lab::SequenceSpec::parse(o.seq);
  cfg.psi = approx_lab::PsiSpec::parse(o.psi);
  cfg.N = o.N;
  cfg.validate();
  const std::size_t S = o.samples ? o.samples : 100;
  echo_measure(o, r.config);
  r.config["seed"] = o.seed;
  r.config["samples"] = S;
  r.config["seq"] = cfg.sequence.describe();
  r.config["psi"] = cfg.psi.describe();
  r.config["N"] = cfg.N;
  r.config["band"] = o.band;
  const auto plan = approx_lab::make_plan(cfg);
  std::vector<kaufman::SamplePoint> pts(S);
  parallel_chunks(S, 4, o.thread_count(), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) pts[i] = approx_lab::lacunary_sample(mu, i, plan);
  });
  auto sum = approx_lab::asymptotic_check(pts, cfg, o.band, o.thread_count());
  measure_items(mu, r);
  r.header = {"sample", "count", "ratio", "boundary_flags", "paths_agree", "excluded", "normalized_error"};
  bool agree = true;
  for (std::size_t i = 0; i < sum.rows.size(); ++i) {
    const auto& row = sum.rows[i];
    if (!row.excluded) agree &= row.report.paths_agree;
    r.rows.push_back({std::to_string(i), std::to_string(row.report.count), num(row.report.ratio),
                      std::to_string(row.report.boundary_flags), yes(row.report.paths_agree), yes(row.excluded),
                      num(row.normalized_error)});
  }
  r.check("lacunary", plan.min_ratio > 1);
  r.check("paths_agree_all", agree);
  r.check("psi_sufficient", sum.psi_sufficient, false);
  r.results["Psi"] = jnum(sum.Psi);
  r.results["min_ratio"] = jnum(plan.min_ratio);
  r.results["excluded"] = sum.excluded;
  r.results["median_ratio"] = jnum(sum.median_ratio);
  r.results["fraction_in_band"] = jnum(sum.fraction_in_band);
  r.results["max_normalized_error"] = jnum(sum.max_normalized_error);
}

void run_littlewood(const Options& o, Report& r) {
  require_seed(o);
  kaufman::Measure mu(measure_params(o));
  approx_lab::MultConfig cfg;
  cfg.alpha = CFWord::parse(o.alpha);
  cfg.gamma = parse_rational(o.gamma.empty() ? "0" : o.gamma);
  std::vector<long> Ns;
  for (const auto& s : split(o.Ns, ',')) Ns.push_back(parse_long(s, "--Ns"));
  if (Ns.empty() || !std::is_sorted(Ns.begin(), Ns.end()) || Ns.front() < 2)
    throw std::invalid_argument("flag --Ns: increasing list of N >= 2 expected");
  const std::size_t S = o.samples ? o.samples : 50;
  echo_measure(o, r.config);
  r.config["seed"] = o.seed;
  r.config["samples"] = S;
  r.config["alpha"] = cfg.alpha.to_string();
  r.config["gamma"] = to_string(cfg.gamma);
  r.config["Ns"] = Ns;

  auto seq = approx_lab::build_mult_sequence(cfg);
  r.check("sequence_certified", seq.certified);
  r.check("certificates_verified", approx_lab::verify_mult_certificates(seq));
  json sj;
  sj["C"] = jnum(seq.C);
  sj["stride"] = seq.stride;
  json terms = json::array();
  for (const auto& t : seq.terms) {
    json tj;
    tj["t"] = t.t;
    tj["cutoff"] = t.cutoff;
    tj["n"] = to_string(t.n);
    tj["dist"] = jnum(to_double(t.dist));
    tj["rate_ok"] = t.rate_ok;
    tj["lower_ok"] = t.lower_ok;
    tj["upper_ok"] = t.upper_ok;
    terms.push_back(tj);
  }
  sj["terms"] = terms;
  r.results["sequence"] = sj;

  const long Nmax = Ns.back();
  std::vector<approx_lab::MultCount> counts(S);
  parallel_chunks(S, 1, o.thread_count(), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto p = mu.sample_to_depth(i, BigInt(approx_lab::kDepthFactor) * Nmax);
      counts[i] = approx_lab::count_mult_hits(cfg.alpha, cfg.gamma, p, Nmax);
    }
  });
  measure_items(mu, r);
  r.header = {"sample"};
  for (long N : Ns) r.header.push_back("count_" + std::to_string(N));
  r.header.push_back("ambiguous");
  std::size_t increasing = 0, at_least_two = 0;
  long ambiguous = 0;
  for (std::size_t i = 0; i < S; ++i) {
    std::vector<std::string> row{std::to_string(i)};
    bool inc = true;
    long prev = -1;
    for (long N : Ns) {
      const long c = counts[i].count_upto(N);
      if (c <= prev) inc = false;
      prev = c;
      row.push_back(std::to_string(c));
    }
    if (inc) ++increasing;
    if (prev >= 2) ++at_least_two;
    ambiguous += counts[i].ambiguous;
    row.push_back(std::to_string(counts[i].ambiguous));
    r.rows.push_back(std::move(row));
  }
  r.results["fraction_strictly_increasing"] = jnum(static_cast<double>(increasing) / static_cast<double>(S));
  r.results["fraction_at_least_two"] = jnum(static_cast<double>(at_least_two) / static_cast<double>(S));
  r.results["ambiguous"] = ambiguous;
}

void run_oscint(const Options& o, Report& r) {
  require_seed(o);
  std::vector<oscint::LemmaId> lemmas;
  if (o.lemma == "ns" || o.lemma == "all") lemmas.push_back(oscint::LemmaId::NonStationary);
  if (o.lemma == "vdc" || o.lemma == "all") lemmas.push_back(oscint::LemmaId::VanDerCorput);
  if (o.lemma == "expint" || o.lemma == "all") lemmas.push_back(oscint::LemmaId::ExpInt);
  if (lemmas.empty()) throw std::invalid_argument("flag --lemma: ns, vdc, expint or all");
  const std::size_t S = o.samples ? o.samples : 1000;
  r.config["seed"] = o.seed;
  r.config["samples"] = S;
  r.config["lemma"] = o.lemma;
  r.config["tol"] = o.tol;
  r.header = {"lemma", "params", "bound", "observed", "ratio", "index", "trivial", "holds", "quad_error",
              "halving_change", "halving_consistent"};
  json summary = json::object();
  for (auto L : lemmas) {
    const std::string name = oscint::lemma_name(L);
    auto sw = oscint::sweep(L, S, o.seed, o.thread_count(), o.tol);
    std::vector<oscint::HalvingCheck> halves(S);
    parallel_chunks(S, 16, o.thread_count(), [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        CounterRng rng(o.seed, i);
        auto spec = oscint::random_instance(L, rng);
        halves[i] = oscint::halving_check(spec.F, spec.X, spec.Y, o.tol);
      }
    });
    std::size_t inconsistent = 0;
    for (std::size_t i = 0; i < S; ++i) {
      const auto& rep = sw.reports[i];
      if (!halves[i].consistent) ++inconsistent;
      r.rows.push_back({name, rep.params, num(rep.bound), num(rep.observed), num(rep.ratio), std::to_string(i),
                        yes(rep.trivial), yes(rep.holds), num(rep.quad_error), num(halves[i].change),
                        yes(halves[i].consistent)});
    }
    r.check(name + ".bounds_hold", sw.violations == 0);
    r.check(name + ".halving_consistent", inconsistent == 0);
    json j;
    j["instances"] = sw.instances;
    j["violations"] = sw.violations;
    j["trivial"] = sw.trivial;
    j["max_ratio"] = jnum(sw.max_ratio);
    j["halving_inconsistent"] = inconsistent;
    summary[name] = j;
  }
  r.results = summary;
}

// ---------------------------------------------------------------- dispatch

struct Command {
  std::string name;
  std::string help;
  void (*fn)(const Options&, Report&);
  Options opts;
  CLI::App* app = nullptr;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--threads", o.threads, "worker threads (default: BADAPPROX_THREADS or all cores)");
  app->add_option("--out-json", o.out_json, "JSON summary path");
  app->add_option("--out-csv", o.out_csv, "CSV detail path");
  app->add_option("--config", o.config, "key=value file; flags override");
}

void add_measure(CLI::App* app, Options& o) {
  app->add_option("--M", o.M, "partial quotient cap");
  app->add_option("--R", o.R, "period of the digit constraint");
  app->add_option("--m", o.m, "block length");
  app->add_option("--kappa", o.kappa);
  app->add_option("--eps", o.eps);
  app->add_option("--j0", o.j0, "blocks per conditioning group");
  app->add_flag("--no-condition", o.no_condition, "use lambda instead of the conditioned measure");
  app->add_option("--seed", o.seed);
}

// Flat key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("flag --config: cannot read " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("flag --config: line " + std::to_string(lineno) + " is not key=value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Appends --key=value for every config entry not given as a flag.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto given = args;
  for (const auto& [k, v] : read_config(path)) {
    if (k == "config") throw std::invalid_argument("flag --config: nested config files are not supported");
    if (!flag_present(given, "--" + k)) args.push_back("--" + k + "=" + v);
  }
  return args;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    err << "badapprox: output error: cannot write " << path << "\n";
    return false;
  }
  return true;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = merge_config(raw_args);
  } catch (const std::exception& e) {
    err << "badapprox: validation error: " << e.what() << "\n";
    return kValidation;
  }

  CLI::App app{"Badly approximable numbers: exact continued fractions, Kaufman measures, counting experiments",
               "badapprox"};
  app.require_subcommand(1);

  std::vector<Command> commands{
      {"identities", "continued-fraction identity suite", run_identities, {}},
      {"ostrowski", "Ostrowski digits of an integer and/or a real", run_ostrowski, {}},
      {"symbolic", "digit counts v_k and enumeration of V_m(a)", run_symbolic, {}},
      {"exponents", "T_m, sigma_m, kappa* and omega", run_exponents, {}},
      {"sample", "draw points from the measure", run_sample, {}},
      {"cylinders", "cylinder measures and their bounds", run_cylinders, {}},
      {"fourier", "Monte Carlo Fourier coefficients", run_fourier, {}},
      {"frostman", "ball-mass profile and Frostman envelope", run_frostman, {}},
      {"lacunary", "lacunary hit counts against 2 Psi(N)", run_lacunary, {}},
      {"littlewood", "multiplicative sequence and counting experiment", run_littlewood, {}},
      {"oscint", "oscillatory integral bound sweeps", run_oscint, {}},
  };
  for (auto& c : commands) {
    c.app = app.add_subcommand(c.name, c.help);
    Options& o = c.opts;
    add_common(c.app, o);
    if (c.name == "identities") {
      o.M = 10;
      c.app->add_option("--word", o.word, "partial quotients, e.g. 1,2x5,3");
      c.app->add_option("--count", o.count, "random words");
      c.app->add_option("--max-len", o.max_len);
      c.app->add_option("--M", o.M, "digit cap for random words");
      c.app->add_option("--seed", o.seed);
    } else if (c.name == "ostrowski") {
      c.app->add_option("--word", o.word);
      c.app->add_option("--n", o.n, "integer to expand");
      c.app->add_option("--gamma", o.gamma, "rational to expand, num/den or decimal");
      c.app->add_option("--lead", o.lead, "zero or positive first digit");
      c.app->add_option("--tau", o.tau, "precision for the depth guard");
    } else if (c.name == "symbolic") {
      c.app->add_option("--word", o.word);
      c.app->add_option("--R", o.R);
      c.app->add_option("--b", o.b, "digit word to test for membership");
    } else if (c.name == "exponents") {
      c.app->add_option("--M", o.M);
      c.app->add_option("--R", o.R);
      c.app->add_option("--m", o.m);
      c.app->add_option("--kappa", o.kappa, "report T_m and sigma_m here instead of at kappa*");
    } else if (c.name == "oscint") {
      c.app->add_option("--seed", o.seed);
      c.app->add_option("--samples", o.samples, "instances per lemma");
      c.app->add_option("--lemma", o.lemma, "ns, vdc, expint or all");
      c.app->add_option("--tol", o.tol);
    } else {
      add_measure(c.app, o);
      if (c.name != "cylinders") c.app->add_option("--samples", o.samples);
      if (c.name == "sample" || c.name == "cylinders") c.app->add_option("--depth", o.depth, "j0-blocks per point");
      if (c.name == "sample") c.app->add_option("--precision", o.precision, "extend until residuals are below this");
      if (c.name == "fourier") c.app->add_option("--k", o.k, "frequencies k1,k2 (repeat or separate with ;)");
      if (c.name == "frostman") {
        c.app->add_option("--radii", o.radii);
        c.app->add_option("--probes", o.probes);
      }
      if (c.name == "lacunary") {
        c.app->add_option("--seq", o.seq, "geom:n1,rho or list:a,b,...");
        c.app->add_option("--psi", o.psi, "const:c, harmonic:c, power:c,p, log8 or table:v1,v2,...");
        c.app->add_option("--N", o.N);
        c.app->add_option("--band", o.band);
      }
      if (c.name == "littlewood") {
        c.app->add_option("--alpha", o.alpha, "partial quotients of alpha");
        c.app->add_option("--gamma", o.gamma);
        c.app->add_option("--Ns", o.Ns, "comma-separated N values");
      }
    }
    CLI::App* sub = c.app;
    o.given = [sub](const std::string& flag) {
      auto* opt = sub->get_option_no_throw(flag);
      return opt && opt->count() > 0;
    };
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kOk;
    err << "badapprox: validation error: " << e.what() << "\n";
    return kValidation;
  }

  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    Report report;
    report.config["subcommand"] = c.name;
    try {
      c.fn(c.opts, report);
    } catch (const DepthError& e) {
      err << "badapprox: guard error: " << e.what() << "\n";
      return kGuard;
    } catch (const GuardError& e) {
      err << "badapprox: guard error: " << e.what() << "\n";
      return kGuard;
    } catch (const std::logic_error& e) {
      err << "badapprox: validation error: " << e.what() << "\n";
      return kValidation;
    } catch (const std::exception& e) {
      err << "badapprox: guard error: " << e.what() << "\n";
      return kGuard;
    }
    const std::string js = report.to_json();
    if (c.opts.out_json.empty()) out << js;
    else if (!write_file(c.opts.out_json, js, err)) return kGuard;
    if (!c.opts.out_csv.empty() && !write_file(c.opts.out_csv, report.to_csv(), err)) return kGuard;
    if (!report.passed()) {
      for (const auto& name : report.required)
        for (const auto& [n, v] : report.items)
          if (n == name && !v) err << "badapprox: conformance failure: " << n << "\n";
      return kConformance;
    }
    return kOk;
  }
  return kValidation;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace badapprox::cli
