#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "../../tools/cli.hpp"
#include "helpers.hpp"
#include "ostrovsky/integrator.hpp"
#include "ostrovsky/spectrum_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ostrovsky;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ostrovsky");
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

// Reads "name,value" rows of norms.csv.
double norms_value(const fs::path& dir, const std::string& name) {
  std::istringstream is(slurp(dir / "norms.csv"));
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(name + ",", 0) == 0) return std::stod(line.substr(name.size() + 1));
  }
  throw std::runtime_error("missing " + name);
}

fs::path four_mode_file(const fs::path& dir) {
  SpectralState s(4);
  for (int n = 1; n <= 4; ++n) s.set_mode(n, 1.0);
  auto path = dir / "four.spec";
  write_spectrum(path, s);
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(run_cli({"simulate", "--n", "abc"}).code == cli::kUsage);
  CHECK(run_cli({"simulate", "--dt", "-1"}).code == cli::kUsage);
  CHECK(run_cli({"verify", "nonsense"}).code == cli::kUsage);
  auto dir = test::scratch_dir("cli_usage");
  CHECK(run_cli({"--out", dir.string(), "simulate", "--init", "file:/nonexistent/x.spec"}).code == cli::kUsage);
  CHECK(run_cli({"--out", dir.string(), "invariance", "--samples", "50"}).code == cli::kUsage);
}

TEST_CASE("help exits 0") { CHECK(run_cli({"--help"}).code == cli::kPass); }

TEST_CASE("norms on the worked example") {
  auto dir = test::scratch_dir("cli_norms");
  auto file = four_mode_file(dir);
  auto out = dir / "run";
  auto r = run_cli({"--out", out.string(), "norms", "--input", file.string(), "--s", "0", "--p", "2"});
  REQUIRE(r.code == cli::kPass);
  CHECK(norms_value(out, "besov_sup") == 2.0);
  CHECK(norms_value(out, "besov_l1") == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(slurp(out / "profile.csv").rfind("j,block_norm\n", 0) == 0);
  auto m = manifest(out);
  CHECK(m["command"] == "norms");
  CHECK(m["outputs"] == json::array({"profile.csv", "norms.csv", "manifest.json"}));
  for (const char* key : {"command", "end_time", "failures", "outputs", "params", "seed", "start_time", "version"}) {
    CHECK(m.contains(key));
  }
  CHECK(m["params"]["s"] == 0.0);
  CHECK(m["params"]["p"] == 2.0);
}

TEST_CASE("manifest keys are sorted and every output is listed") {
  auto dir = test::scratch_dir("cli_manifest");
  auto r = run_cli({"--out", dir.string(), "--seed", "3", "norms", "--generate", "white-noise", "--n", "16"});
  REQUIRE(r.code == cli::kPass);
  auto text = slurp(dir / "manifest.json");
  auto m = json::parse(text);
  CHECK(m["seed"] == 3);
  std::vector<std::string> keys;
  for (auto it = m.begin(); it != m.end(); ++it) keys.push_back(it.key());
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(text.find("\"command\"") < text.find("\"version\""));
  std::set<std::string> listed;
  for (const auto& o : m["outputs"]) listed.insert(o.get<std::string>());
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) CHECK(listed.count(entry.path().lexically_relative(dir).generic_string()) == 1);
  }
}

TEST_CASE("empty spectrum gives zero norms") {
  auto dir = test::scratch_dir("cli_empty");
  auto file = dir / "empty.spec";
  {
    std::ofstream os(file);
    os << "ostrovsky-spectrum v1 N=0\n";
  }
  auto r = run_cli({"--out", (dir / "run").string(), "norms", "--input", file.string()});
  REQUIRE(r.code == cli::kPass);
  for (const char* name : {"sobolev", "besov_sup", "besov_l1"}) CHECK(norms_value(dir / "run", name) == 0.0);
}

TEST_CASE("malformed spectrum names the line") {
  auto dir = test::scratch_dir("cli_malformed");
  auto file = dir / "bad.spec";
  {
    std::ofstream os(file);
    os << "ostrovsky-spectrum v1 N=2\n1,0,0\n2,zz,0\n";
  }
  auto r = run_cli({"--out", (dir / "run").string(), "norms", "--input", file.string()});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("simulate with zero horizon writes one snapshot") {
  auto dir = test::scratch_dir("cli_t0");
  auto r = run_cli({"--out", dir.string(), "--seed", "7", "simulate", "--n", "16", "--t", "0"});
  REQUIRE(r.code == cli::kPass);
  auto m = manifest(dir);
  CHECK(m["outputs"] == json::array({"config.json", "t=0.csv", "manifest.json"}));
  CHECK(load_trajectory(dir).snapshots.size() == 1);
}

TEST_CASE("simulate round-trips a file initial state") {
  auto dir = test::scratch_dir("cli_file");
  auto first = dir / "first";
  REQUIRE(run_cli({"--out", first.string(), "--seed", "5", "simulate", "--n", "8", "--t", "0"}).code == cli::kPass);
  auto second = dir / "second";
  auto init = "file:" + (first / "t=0.csv").string();
  REQUIRE(run_cli({"--out", second.string(), "simulate", "--init", init, "--t", "0"}).code == cli::kPass);
  CHECK(slurp(first / "t=0.csv") == slurp(second / "t=0.csv"));
  CHECK(manifest(second)["params"]["n"] == 8);
}

TEST_CASE("simulate prints drift summary and reruns bit-identically") {
  auto dir = test::scratch_dir("cli_sim");
  std::vector<std::string> args{"--jobs", "1", "--seed", "11", "simulate", "--n", "16", "--dt", "1e-4", "--t", "0.05", "--stride", "100"};
  auto a_args = args, b_args = args;
  a_args.insert(a_args.begin(), {"--out", (dir / "a").string()});
  b_args.insert(b_args.begin(), {"--out", (dir / "b").string()});
  auto a = run_cli(a_args);
  auto b = run_cli(b_args);
  REQUIRE(a.code == cli::kPass);
  REQUIRE(b.code == cli::kPass);
  CHECK(a.out.find("l2") != std::string::npos);
  CHECK(a.out.find("hamiltonian") != std::string::npos);
  CHECK(a.out.find("mean") != std::string::npos);
  auto files = manifest(dir / "a")["outputs"];
  CHECK(files.size() == 2 + 5 + 1);
  for (const auto& f : files) {
    if (f == "manifest.json") continue;
    CHECK(slurp(dir / "a" / f.get<std::string>()) == slurp(dir / "b" / f.get<std::string>()));
  }
}

TEST_CASE("simulate reports a CFL violation as a numerical failure") {
  auto dir = test::scratch_dir("cli_cfl");
  auto r = run_cli({"--out", dir.string(), "simulate", "--n", "64", "--dt", "0.5", "--t", "1"});
  CHECK(r.code == cli::kNumerical);
  CHECK(manifest(dir)["failures"]["blow_up"] == 1);
}

TEST_CASE("invariance at time zero and in linear mode") {
  auto dir = test::scratch_dir("cli_inv");
  auto r = run_cli({"--out", (dir / "zero").string(), "invariance", "--n", "8", "--samples", "200", "--times", "0"});
  CHECK(r.code == cli::kPass);
  CHECK(r.out.find("verdict PASS") != std::string::npos);
  CHECK(fs::exists(dir / "zero" / "invariance.csv"));
  auto lin = run_cli({"--out", (dir / "lin").string(), "invariance", "--n", "8", "--samples", "200",
                      "--times", "0,0.5,1", "--linear-only", "--save-ensemble"});
  CHECK(lin.code == cli::kPass);
  CHECK(fs::exists(dir / "lin" / "ensemble" / "ensemble.json"));
  auto m = manifest(dir / "lin");
  CHECK(m["params"]["linear_only"] == true);
  CHECK(m["failures"]["excluded_members"] == 0);
}

TEST_CASE("tail and growth commands") {
  auto dir = test::scratch_dir("cli_tail");
  auto t = run_cli({"--out", (dir / "tail").string(), "tail", "--n", "16", "--samples", "10000"});
  CHECK(t.code == cli::kPass);
  CHECK(slurp(dir / "tail" / "tail.csv").rfind("K,exceedance,used_in_fit\n", 0) == 0);
  CHECK(run_cli({"--out", (dir / "t2").string(), "tail", "--samples", "100"}).code == cli::kUsage);
  auto g = run_cli({"--out", (dir / "growth").string(), "growth", "--n", "8", "--samples", "40",
                    "--horizons", "0.02,0.04", "--eps", "0.5,0.1", "--dt", "1e-3"});
  CHECK((g.code == cli::kPass || g.code == cli::kStatisticalFail));
  CHECK(slurp(dir / "growth" / "growth.csv").rfind("T,eps,quantile,quantile_squared,log_T_over_eps\n", 0) == 0);
}

TEST_CASE("verify commands") {
  auto dir = test::scratch_dir("cli_verify");
  auto res = run_cli({"--out", (dir / "res").string(), "verify", "resonance", "--l", "16"});
  CHECK(res.code == cli::kPass);
  CHECK(res.out.rfind("resonance PASS", 0) == 0);
  CHECK(fs::exists(dir / "res" / "resonance.csv"));

  auto gtv = run_cli({"--out", (dir / "gtv").string(), "verify", "gtv", "--alpha", "0.5", "--beta", "0.5", "--eps", "0.1"});
  CHECK(gtv.code == cli::kPass);
  CHECK(gtv.out.find("value_at_a0=3.14159265") != std::string::npos);

  auto bad = run_cli({"--out", (dir / "sum").string(), "verify", "sum", "--l1", "0.5", "--l2", "0.2"});
  CHECK(bad.code == cli::kUsage);
  CHECK(bad.err.find("l1 + 2 l2 > 1") != std::string::npos);

  auto omega = run_cli({"--out", (dir / "omega").string(), "verify", "omega", "--n-max", "4", "--log2-m-max", "10"});
  CHECK(fs::exists(dir / "omega" / "omega-set.csv"));
  CHECK(fs::exists(dir / "omega" / "omega-weight.csv"));
  CHECK((omega.code == cli::kPass || omega.code == cli::kStatisticalFail));
}

}
