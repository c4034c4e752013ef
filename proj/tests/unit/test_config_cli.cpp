#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "sphparisi/chain_io.hpp"
#include "sphparisi/cli.hpp"
#include "sphparisi/config.hpp"

using namespace sphparisi;
namespace fs = std::filesystem;

namespace {
struct Run {
  int code = 0;
  std::string err;
  fs::path out;
};

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sphparisi_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(int (*fn)(const CliOptions&, std::ostream&, std::ostream&), const std::string& name, const std::string& config,
        bool strict = false) {
  const fs::path dir = scratch_dir(name);
  std::ofstream(dir / "config.json") << config;
  CliOptions opts;
  opts.config = dir / "config.json";
  opts.out = dir;
  opts.strict = strict;
  std::ostringstream log, err;
  const int code = fn(opts, log, err);
  return {code, err.str(), dir};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// drops the wall-clock line or column so runs can be compared byte for byte
std::string without_timing(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("wall_time") != std::string::npos && line.find("quantity") == std::string::npos) continue;
    const auto cut = line.rfind(',');
    out += (line.find(',') != std::string::npos && line.find('{') == std::string::npos ? line.substr(0, cut) : line) + "\n";
  }
  return out;
}
}  // namespace

TEST_CASE("configuration parsing rejects unknown keys and bad values") {
  using nlohmann::json;
  CHECK_THROWS_AS(parse_solve_config(json::parse(R"({"mixture": [], "kmax": 2})")), ConfigError);
  CHECK_THROWS_AS(parse_solve_config(json::parse(R"({"mixture": [{"p": 2, "beta": 1, "x": 0}]})")), ConfigError);
  CHECK_THROWS_AS(parse_solve_config(json::parse(R"({"mixture": [{"p": 0, "beta": 1}]})")), ConfigError);
  CHECK_THROWS_AS(parse_simulate_config(json::parse(R"({"mode": "nope", "mixture": [], "N": 4})")), ConfigError);
  try {
    parse_solve_config(json::parse(R"({"mixture": [], "order_parameter": {"k": 2, "m": [0, 0.7, 0.5], "q": [0, 0.1, 0.2, 1]}})"));
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("order_parameter.m[2]") != std::string::npos);
  }
  const auto c = parse_solve_config(json::parse(R"({"mixture": [{"p": 3, "beta": 0.5}, {"p": 2, "beta": 1}], "k_max": 2})"));
  CHECK(c.mixture.terms().size() == 2);
  CHECK(c.k_max == 2);
  CHECK(mixture_from_json(mixture_to_json(c.mixture)).terms()[0].p == 2);
}

TEST_CASE("solve command") {
  const auto zero = run(run_solve, "solve_zero", R"({"mixture": []})");
  CHECK(zero.code == kExitOk);
  CHECK(nlohmann::json::parse(slurp(zero.out / "solve.json"))["value"].get<double>() == 0.0);

  const std::string cfg = R"({"mixture": [{"p": 2, "beta": 1}], "k_max": 2})";
  const auto a = run(run_solve, "solve_a", cfg);
  CHECK(a.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(a.out / "solve.json"));
  CHECK(std::abs(j["value"].get<double>() - oracle::pure2_value(1.0)) < 1e-5);
  CHECK(j["per_k"].size() >= 1);
  const auto b = run(run_solve, "solve_b", cfg);
  CHECK(without_timing(slurp(a.out / "solve.json")) == without_timing(slurp(b.out / "solve.json")));

  const auto bad = run(run_solve, "solve_bad",
                       R"({"mixture": [], "order_parameter": {"k": 2, "m": [0, 0.7, 0.5], "q": [0, 0.1, 0.2, 1]}})");
  CHECK(bad.code == kExitConfig);
  CHECK(bad.err.find("nondecreasing") != std::string::npos);
}

TEST_CASE("finite-m command") {
  const auto zero = run(run_finite_m, "fm_zero",
                        R"({"mixture": [], "order_parameter": {"k": 1, "m": [0, 1], "q": [0, 0, 1]}, "M": [8, 16]})");
  CHECK(zero.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(zero.out / "finite_m.json"));
  for (const auto& row : j["rows"]) CHECK(row["pm"].get<double>() == 0.0);

  const auto deep = run(run_finite_m, "fm_deep",
                        R"({"mixture": [{"p": 2, "beta": 1}], "order_parameter": {"k": 4, "m": [0, 0.2, 0.4, 0.6, 1],
                            "q": [0, 0.1, 0.2, 0.3, 0.4, 1]}, "M": [8]})");
  CHECK(deep.code == kExitResource);
}

TEST_CASE("simulate command") {
  const auto fe = run(run_simulate, "sim_fe", R"({"mode": "free-energy", "mixture": [], "N": 8, "n_config": 50, "n_disorder": 3})");
  CHECK(fe.code == kExitOk);
  const std::string csv = slurp(fe.out / "simulate.csv");
  CHECK(csv.rfind("quantity,value,stderr,N,M,seed,wall_time\n", 0) == 0);
  CHECK(csv.find("free_energy,0,exact") != std::string::npos);

  const auto cav = run(run_simulate, "sim_cav", R"({"mode": "cavity-check", "mixture": [{"p": 3, "beta": 1}], "N": 3, "M": 2})");
  CHECK(cav.code == kExitOk);
  const std::string ccsv = slurp(cav.out / "simulate.csv");
  const auto pos = ccsv.find("max_relative_identity_error,");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(ccsv.substr(pos + 28)) < 1e-10);

  const auto few = run(run_simulate, "sim_few",
                       R"({"mode": "gg-stats", "mixture": [], "N": 8, "chains": 2, "phi": [{"p": 1, "n": 3}]})");
  CHECK(few.code == kExitConfig);
  CHECK(few.err.find("insufficient replicas") != std::string::npos);

  const std::string gg = R"({"mode": "gg-stats", "mixture": [{"p": 2, "beta": 0.5}], "N": 8, "chains": 3, "seed": 4,
      "gibbs": {"steps": 2000, "burn_in": 500}, "resamples": 20, "dump_chains": true})";
  const auto g1 = run(run_simulate, "sim_gg1", gg), g2 = run(run_simulate, "sim_gg2", gg);
  CHECK(g1.code == kExitOk);
  CHECK(without_timing(slurp(g1.out / "simulate.csv")) == without_timing(slurp(g2.out / "simulate.csv")));
  const auto dump = read_chain_dump(g1.out / "chain_0.bin");
  CHECK(dump.n == 8);
  CHECK(dump.samples.size() == dump.count * 8);
  CHECK(slurp(g1.out / "chain_0.bin") == slurp(g2.out / "chain_0.bin"));
}

TEST_CASE("chain dump round trip") {
  const fs::path dir = scratch_dir("dump");
  ChainDump d{3, 2, {1.0, -2.5, 0.125, 1e-300, -0.0, 7.0}};
  write_chain_dump(dir / "c.bin", d);
  const auto back = read_chain_dump(dir / "c.bin");
  CHECK(back.count == 3);
  CHECK(back.n == 2);
  CHECK(back.samples == d.samples);
  CHECK(slurp(dir / "c.bin").substr(0, 8) == "SPHCHAIN");
  std::ofstream(dir / "bad.bin") << "NOTACHAIN";
  CHECK_THROWS(read_chain_dump(dir / "bad.bin"));
}
