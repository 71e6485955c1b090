#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "doctest.h"
#include "fracspec/cli.hpp"
#include "fracspec/errors.hpp"

using namespace fracspec;
using namespace fracspec::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracspec_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kHeat = R"({"dimension": 1, "rho": 1.0, "T": 1.0,
  "phi": {"builtin": "cosine_mode", "n": [1]}, "numerics": {"dt": 0.5}})";

}  // namespace

TEST_CASE("config: parse, resolve and echo") {
  RunConfig c = parse_config(json::parse(kHeat));
  CHECK(c.dim == 1);
  CHECK(c.rho == 1.0);
  CHECK(c.regularity_exponent == doctest::Approx(1.0));
  CHECK(c.truncation_radius_sq == 0);
  resolve(c, 10);
  CHECK(c.truncation_radius_sq == 2);
  CHECK(c.grid_M == 9);
  CHECK(c.dt == 0.5);

  const json echo = to_json(c);
  CHECK_FALSE(echo.contains("output_dir"));
  RunConfig again = parse_config(echo);
  resolve(again, 10);
  CHECK(to_json(again) == echo);

  RunConfig d = parse_config(json::parse(R"({"dimension": 2, "rho": 0.5, "T": 2.0,
    "phi": {"modes": [[3, 0, 1.0, 0.0], [0, -2, 0.0, 0.5]]},
    "source": [{"g": {"builtin": "constant", "value": 2.0}, "q": {"kind": "polynomial", "coeffs": [0, 1]}}]})"));
  resolve(d, 8);
  CHECK(d.truncation_radius_sq == 10);
  CHECK(d.grid_M == 9);
  CHECK(d.dt == 0.25);
  CHECK(d.regularity_exponent == doctest::Approx(1.5));
  const ProblemSpec p = d.problem();
  CHECK(p.source.size() == 1);
  CHECK(p.source[0].q(3.0) == 3.0);
  CHECK(std::get<SpectralField>(p.phi).get({3, 0}) == Complex(1.0));
}

TEST_CASE("config: rejected documents") {
  auto bad = [](const std::string& text) {
    RunConfig c = parse_config(json::parse(text));
    resolve(c, 10);
  };
  const std::string base = R"("dimension": 1, "T": 1.0, "phi": {"builtin": "cosine_mode", "n": [1]})";
  CHECK_NOTHROW(bad("{" + base + R"(, "rho": 0.5})"));
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": 0.5, "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": 1.5})"), ConfigError);
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": "half"})"), ConfigError);
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": 0.5, "numerics": {"dt": 0.3}})"), ConfigError);
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": 0.5, "numerics": {"grid_M": 2}})"), ConfigError);
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": 0.5, "numerics": {"truncation_radius_sq": 50, "grid_M": 9}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": 0.5, "numerics": {"mesh_M": 1}})"), ConfigError);
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": 0.5, "workers": 0})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"dimension": 1, "rho": 0.5, "T": 1.0, "phi": {"modes": [[1, 0.5]]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"dimension": 2, "rho": 0.5, "T": 1.0, "phi": {"builtin": "hardy_littlewood", "k_max": 8}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": 0.5, "source": [{"g": {"builtin": "constant", "value": 1},
                  "q": {"kind": "sampled", "nodes": [0, 0], "values": [1, 2]}}]})"),
                  ConfigError);
  CHECK_THROWS_AS(bad("{" + base + R"(, "rho": 0.5, "source": [{"g": {"builtin": "constant", "value": 1},
                  "q": {"kind": "bessel"}}]})"),
                  ConfigError);
}

TEST_CASE("cli: mlf table") {
  const Run r = run_cli({"mlf", "--rho", "0.5", "--t", "0,1"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("t,value,est_rel_error,branch\n") == 0);
  CHECK(r.out.find("\n1,0.427583576155807") != std::string::npos);
  CHECK(run_cli({"mlf", "--rho", "3", "--t", "1"}).code == kExitConfig);
  CHECK(run_cli({"mlf", "--t", "1"}).code == kExitConfig);
  CHECK(run_cli({"no-such-command"}).code == kExitConfig);
  CHECK(run_cli({"--help"}).code == kExitOk);
}

TEST_CASE("cli: solve writes the solution and diagnostics") {
  const fs::path dir = scratch("solve");
  const fs::path cfg = write(dir / "heat.json", kHeat);
  const Run r = run_cli({"solve", "--config", cfg.string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(dir / "out" / "solution.csv");
  CHECK(csv.find("x_1,t,re_u,im_u\n") == 0);
  // 9 grid points at t = 0, 0.5, 1.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 9 * 3);
  const json diag = json::parse(slurp(dir / "out" / "diagnostics.json"));
  CHECK(diag.at("command") == "solve");
  CHECK(diag.at("mode_count") == 2);
  CHECK(diag.at("regularity").at("passed") == true);

  const Run again = run_cli({"solve", "--config", cfg.string(), "--out", (dir / "again").string()});
  REQUIRE(again.code == kExitOk);
  CHECK(slurp(dir / "again" / "solution.csv") == csv);
  CHECK(slurp(dir / "again" / "diagnostics.json") == slurp(dir / "out" / "diagnostics.json"));
}

TEST_CASE("cli: exit-code classes") {
  const fs::path dir = scratch("codes");
  CHECK(run_cli({"solve", "--config", (dir / "missing.json").string()}).code == kExitConfig);
  const fs::path broken = write(dir / "broken.json", "{\"dimension\": ");
  CHECK(run_cli({"solve", "--config", broken.string()}).code == kExitConfig);

  const fs::path rough = write(dir / "hl.json", R"({"dimension": 1, "rho": 0.5, "T": 1.0,
    "phi": {"builtin": "hardy_littlewood", "k_max": 64}, "regularity_exponent": 0.5})");
  const Run strict = run_cli({"solve", "--config", rough.string(), "--strict", "--out", (dir / "s").string()});
  CHECK(strict.code == kExitRegularity);
  const Run lax = run_cli({"solve", "--config", rough.string(), "--out", (dir / "l").string()});
  CHECK(lax.code == kExitOk);
  CHECK(lax.err.find("warning") != std::string::npos);

  const fs::path stingy = write(dir / "stingy.json", R"({"dimension": 1, "rho": 0.5, "T": 1.0,
    "phi": {"builtin": "cosine_mode", "n": [1]},
    "source": [{"g": {"builtin": "cosine_mode", "n": [1]}, "q": {"kind": "cosine", "omega": 7.0}}],
    "numerics": {"mesh_M": 4, "tolerance": 1e-15, "max_doublings": 0}})");
  CHECK(run_cli({"solve", "--config", stingy.string(), "--out", (dir / "c").string()}).code == kExitConvergence);
}

TEST_CASE("cli: residual") {
  const fs::path dir = scratch("residual");
  const fs::path cfg = write(dir / "relax.json", R"({"dimension": 1, "rho": 0.5, "T": 1.0,
    "phi": {"builtin": "cosine_mode", "n": [1]}, "numerics": {"dt": 0.00390625}})");
  const Run r = run_cli({"residual", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == kExitOk);
  const json rep = json::parse(slurp(dir / "residual.json"));
  CHECK(rep.at("observed_rate").get<double>() >= 1.0);

  const fs::path zero = write(dir / "zero.json", R"({"dimension": 1, "rho": 0.5, "T": 1.0,
    "phi": {"builtin": "constant", "value": 0.0}})");
  CHECK(run_cli({"residual", "--config", zero.string(), "--out", (dir / "z").string()}).code == kExitOk);
}

TEST_CASE("cli: counterexample and norm") {
  const fs::path dir = scratch("ce");
  const Run ce = run_cli({"counterexample", "--rho", "0.5", "--t", "1", "--kmax", "20000", "--out", dir.string()});
  CHECK(ce.code == kExitOk);
  const json fit = json::parse(slurp(dir / "growth_fit.json"));
  CHECK(fit.at("relative_slope_error").get<double>() <= 0.05);
  CHECK(fs::exists(dir / "growth.csv"));
  CHECK(run_cli({"counterexample", "--rho", "1", "--t", "1"}).code == kExitConfig);

  const fs::path cos = write(dir / "cos.csv", "n,re,im\n1,0.5,0\n-1,0.5,0\n");
  const Run n = run_cli({"norm", "--coeffs", cos.string(), "--a", "1"});
  CHECK(n.code == kExitOk);
  CHECK(n.out == "a,norm_sq\n1,1\ncritical_exponent,insufficient_data\n");
  const fs::path empty = write(dir / "empty.csv", "n,re,im\n");
  CHECK(run_cli({"norm", "--coeffs", empty.string()}).out.find("critical_exponent,inf") != std::string::npos);
  const fs::path bad = write(dir / "bad.csv", "n,re,im\n1,zero,0\n");
  CHECK(run_cli({"norm", "--coeffs", bad.string()}).code == kExitConfig);
}
