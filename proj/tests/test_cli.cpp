#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chernoff/cli_runner.hpp"
#include "chernoff/errors.hpp"

using namespace chernoff;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "chernoff_scope");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write_file(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kExponent = R"({
  "scene": {"objects": [{"kind": "ellipse", "semi_axis_x": 1.0, "semi_axis_y": 0.5},
                        {"kind": "ellipse", "semi_axis_x": 0.5, "semi_axis_y": 1.0}]},
  "gammas": [0.05, 0.1],
  "measurements": ["trispade", "bspade"]
})";

}  // namespace

TEST_CASE("exponent run writes a stamped CSV and reruns byte for byte") {
  const std::string dir = "cli_test_exponent";
  fs::remove_all(dir);
  const std::string cfg = write_file(dir + "/cfg.json", kExponent);
  const Invocation a = invoke({"exponent", "--config", cfg, "--out", dir + "/a"});
  CHECK(a.code == 0);
  const std::string text = slurp(dir + "/a/exponent.csv");
  CHECK(text.rfind("# chernoff_scope ", 0) == 0);
  CHECK(text.find("# config_hash ") != std::string::npos);
  CHECK(text.find("gamma,method,measurement,xi,s_star,search_region,trace_deficit,error") != std::string::npos);
  CHECK(text.find("exact-quantum") != std::string::npos);
  CHECK(text.find(",bspade,") != std::string::npos);

  const Invocation b = invoke({"exponent", "--config", cfg, "--out", dir + "/b", "--threads", "2"});
  CHECK(b.code == 0);
  CHECK(slurp(dir + "/b/exponent.csv") == text);
  fs::remove_all(dir);
}

TEST_CASE("config errors exit with code 1 and name the key") {
  const std::string dir = "cli_test_errors";
  fs::remove_all(dir);
  const std::string bad = write_file(dir + "/bad.json", R"({"gammas": [0.1], "gamas": 3,
    "scene": {"objects": [{"kind": "disc", "radius": 1}, {"kind": "disc", "radius": 0.5}]}})");
  const Invocation r = invoke({"exponent", "--config", bad, "--out", dir});
  CHECK(r.code == 1);
  CHECK(r.err.find("gamas") != std::string::npos);

  const std::string one = write_file(dir + "/one.json", R"({"gammas": [0.1],
    "scene": {"objects": [{"kind": "disc", "radius": 1}]}})");
  CHECK(invoke({"exponent", "--config", one, "--out", dir}).code == 1);
  CHECK(invoke({"exponent", "--out", dir}).code == 1);
  CHECK(invoke({"exponent", "--config", dir + "/missing.json"}).code == 1);
  const std::string empty = write_file(dir + "/empty.json", R"({"gammas": []})");
  CHECK(invoke({"capacity", "--config", empty, "--out", dir}).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(R"({"gammas": {"min": 0.01, "max": 1, "count": 3},
    "threshold": "inf", "threshold_mode": "relative"})", "capacity");
  REQUIRE(c.gammas.size() == 3);
  CHECK(c.gammas[1] == doctest::Approx(0.1));
  CHECK(std::isinf(c.threshold));
  CHECK(c.threshold_relative);
  CHECK(c.measurements.size() == 2);
  const RunConfig s = parse_config(R"({"gammas": [0.1], "seed": 3})", "mary", std::uint64_t{9});
  CHECK(s.seed == 9);
  try {
    parse_config(R"({"gammas": [0.1], "psf": {"kind": "airy"}})", "mary");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("psf.kind") != std::string::npos);
  }
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("mary, capacity and simulate runs") {
  const std::string dir = "cli_test_runs";
  fs::remove_all(dir);
  const std::string mary = write_file(dir + "/mary.json", R"({"gammas": [0.1, 1.0, 5.0], "mx_values": [2, 4],
    "threshold": 1e-4, "threshold_mode": "relative"})");
  CHECK(invoke({"mary", "--config", mary, "--out", dir}).code == 0);
  const std::string m = slurp(dir + "/mary.csv");
  CHECK(m.find("section,gamma,mx,quantity,value,error") != std::string::npos);
  CHECK(m.find("gamma_boundary") != std::string::npos);

  CHECK(invoke({"capacity", "--config", mary, "--out", dir}).code == 0);
  CHECK(slurp(dir + "/capacity.csv").find("gamma,measurement,threshold,m_max,mx,xi,error") != std::string::npos);

  const std::string sim = write_file(dir + "/sim.json", R"({
    "scene": {"objects": [{"kind": "points", "points": [[0, 0, 1]]},
                          {"kind": "points", "points": [[-1, 0, 0.5], [1, 0, 0.5]]}]},
    "gammas": [0.5], "measurements": ["bspade"], "trials": 4000, "photons": [20, 40, 60, 80]})");
  const Invocation s1 = invoke({"simulate", "--config", sim, "--out", dir + "/s1", "--seed", "4"});
  CHECK(s1.code == 0);
  CHECK(invoke({"simulate", "--config", sim, "--out", dir + "/s2", "--seed", "4"}).code == 0);
  CHECK(slurp(dir + "/s1/simulate.csv") == slurp(dir + "/s2/simulate.csv"));
  CHECK(slurp(dir + "/s1/simulate_fit.csv").find("fitted_exponent") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("version flag") {
  const Invocation v = invoke({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find("chernoff_scope") != std::string::npos);
}
