#include "doctest.h"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "badapprox/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = badapprox::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "badapprox_cli_test";
  fs::create_directories(dir);
  auto p = dir / name;
  fs::remove(p);
  return p;
}

// Bisection on the two-word form 8^{1-2k} + 2 * 12^{1-2k} = 1.
double kappa_star_233() {
  double lo = 0.5, hi = 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::pow(8, 1 - 2 * mid) + 2 * std::pow(12, 1 - 2 * mid) > 1 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("cli: exponents") {
  auto r = cli({"exponents", "--M", "2", "--R", "3", "--m", "3"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j.contains("config"));
  CHECK(j.contains("conformance"));
  const double ks = j["results"]["kappa_star"];
  CHECK(std::abs(ks - kappa_star_233()) < 1e-9);
  CHECK(std::abs(ks - 0.7347) < 1e-3);
  CHECK(j["config"]["M"] == 2);
  CHECK(j["conformance"]["passed"] == true);
}

TEST_CASE("cli: fourier output is byte-identical across runs and thread counts") {
  std::vector<std::string> base{"fourier", "--M", "2", "--R", "3", "--m", "3", "--kappa", "0.6",
                                "--eps", "0.2", "--samples", "20000", "--k", "64,0", "--k", "3,5;0,16",
                                "--seed", "7"};
  std::vector<std::string> outs;
  for (const char* t : {"1", "3", "1"}) {
    auto js = scratch(std::string("f") + t + std::to_string(outs.size()) + ".json");
    auto cs = scratch(std::string("f") + t + std::to_string(outs.size()) + ".csv");
    auto args = base;
    args.insert(args.end(), {"--threads", t, "--out-json", js.string(), "--out-csv", cs.string()});
    REQUIRE(cli(args).code == 0);
    outs.push_back(slurp(js) + slurp(cs));
  }
  CHECK(outs[0] == outs[1]);
  CHECK(outs[0] == outs[2]);
  CHECK(outs[0].find("k1,k2,re,im") != std::string::npos);
  CHECK(outs[0].find("# config.seed=7") != std::string::npos);
  CHECK(outs[0].find("threads") == std::string::npos);
}

TEST_CASE("cli: validation errors write nothing") {
  auto js = scratch("bad.json");
  auto cs = scratch("bad.csv");
  auto r = cli({"fourier", "--seed", "1", "--bogus", "2", "--out-json", js.string(), "--out-csv", cs.string()});
  CHECK(r.code == 1);
  CHECK_FALSE(fs::exists(js));
  CHECK_FALSE(fs::exists(cs));

  r = cli({"fourier", "--samples", "2000", "--out-json", js.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("--seed") != std::string::npos);
  CHECK_FALSE(fs::exists(js));

  CHECK(cli({}).code == 1);
  CHECK(cli({"nosuch"}).code == 1);
  CHECK(cli({"exponents", "--M", "1"}).code == 1);
  CHECK(cli({"sample", "--seed", "1", "--m", "4"}).code == 1);  // m not a multiple of R
  CHECK(cli({"lacunary", "--seed", "1", "--psi", "wobble"}).code == 1);
}

TEST_CASE("cli: guard failures exit 3 with the guard name") {
  auto r = cli({"exponents", "--M", "10", "--R", "3", "--m", "9"});
  CHECK(r.code == 3);
  CHECK(r.err.find("feasibility guard") != std::string::npos);

  r = cli({"ostrowski", "--word", "2x5", "--n", "100000"});
  CHECK(r.code == 3);
  CHECK(r.err.find("encode_int") != std::string::npos);

  // alpha word too short for N
  r = cli({"littlewood", "--seed", "1", "--samples", "1", "--alpha", "2x12", "--Ns", "1000"});
  CHECK(r.code == 3);
  CHECK(r.err.find("guard") != std::string::npos);
}

TEST_CASE("cli: conformance failure exits 2 and still writes output") {
  // unconditioned (2,3,3) mass is far too lumpy for r^s with s = 2 kappa - 2 - 4 (2 - kappa) eps
  auto js = scratch("frost.json");
  auto cs = scratch("frost.csv");
  auto r = cli({"frostman", "--kappa", "1.5", "--eps", "0.01", "--no-condition", "--seed", "1", "--samples",
                "10000", "--out-json", js.string(), "--out-csv", cs.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("envelope_holds") != std::string::npos);
  REQUIRE(fs::exists(js));
  auto j = json::parse(slurp(js));
  CHECK(j["conformance"]["passed"] == false);
  CHECK(j["conformance"]["items"]["envelope_holds"] == false);
  CHECK(slurp(cs).find("# conformance.envelope_holds=false") != std::string::npos);

  // informational items do not fail a run
  js = scratch("lac.json");
  r = cli({"lacunary", "--seed", "2", "--samples", "2", "--seq", "list:10,11,12", "--psi", "const:0.1", "--N", "3",
           "--out-json", js.string()});
  CHECK(r.code == 0);
  j = json::parse(slurp(js));
  CHECK(j["conformance"]["items"]["psi_sufficient"] == false);
}

TEST_CASE("cli: config file, flags override") {
  auto cfg = scratch("run.cfg");
  {
    std::ofstream f(cfg);
    f << "# exponents run\nM = 3\nR=3\nm=3\n";
  }
  auto r = cli({"exponents", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["config"]["M"] == 3);
  r = cli({"exponents", "--config", cfg.string(), "--M", "2"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["config"]["M"] == 2);
  CHECK(std::abs(double(j["results"]["kappa_star"]) - kappa_star_233()) < 1e-9);

  {
    std::ofstream f(cfg);
    f << "M=3\nunknown_key=1\n";
  }
  CHECK(cli({"exponents", "--config", cfg.string()}).code == 1);
  CHECK(cli({"exponents", "--config", "/nonexistent/x.cfg"}).code == 1);
}

TEST_CASE("cli: the other subcommands run") {
  auto ok = [](std::vector<std::string> args) {
    auto r = cli(args);
    INFO(args[0] << ": " << r.err);
    CHECK(r.code == 0);
    return r.code == 0 ? json::parse(r.out) : json();
  };
  auto id = ok({"identities", "--count", "30", "--seed", "4"});
  CHECK(id["results"]["words"] == 30);
  auto os = ok({"ostrowski", "--word", "2x60", "--n", "1000", "--gamma", "-1/7"});
  CHECK(os["results"]["integer"]["decoded"] == "1000");
  CHECK(os["conformance"]["items"]["lemma_equality"] == true);
  auto sy = ok({"symbolic", "--word", "2,3,2,4,2,3", "--R", "3"});
  CHECK(sy["results"]["v_m"] == "36");
  auto sa = ok({"sample", "--seed", "1", "--samples", "4", "--depth", "2"});
  CHECK(sa["conformance"]["items"]["q_sandwich_all"] == true);
  auto cy = ok({"cylinders", "--depth", "2"});
  CHECK(std::abs(double(cy["results"]["total"]) - 1) < 1e-12);
  auto lw = ok({"littlewood", "--seed", "3", "--samples", "2", "--Ns", "100,1000"});
  CHECK(lw["results"]["sequence"]["terms"][0]["n"] == "12");
  auto oi = ok({"oscint", "--seed", "5", "--samples", "20", "--lemma", "vdc"});
  CHECK(oi["results"]["vandercorput"]["violations"] == 0);
}
