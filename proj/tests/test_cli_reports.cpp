#include "doctest.h"

#include "fbmjs/cli.hpp"
#include "fbmjs/config.hpp"
#include "fbmjs/reports.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fbmjs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fbmjs_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults from a minimal config") {
  const auto c = parse_config("# nothing but a comment\n\n");
  CHECK(c.method == SimMethod::circulant);
  CHECK(c.model.n == 256);
  CHECK(c.n_reps == 50000);
  CHECK(c == ExperimentConfig{});
}

TEST_CASE("parsing values, comments and lists") {
  const auto c = parse_config(
      "model.d = 5   # five components\n"
      "model.H=0.1\n"
      "method = volterra\n"
      "estimator.labels = mle, js-rational\n"
      "estimator.a = 1.5\n"
      "drift.kind = power2H\n"
      "drift.c = 2\n"
      "sweep.a = 1, 2, 3\n"
      "stein.theta = 1,0,0,0,0\n"
      "seed = 18446744073709551615\n");
  CHECK(c.model.d == 5);
  CHECK(c.model.H == 0.1);
  CHECK(c.method == SimMethod::volterra);
  CHECK(c.estimators == std::vector<std::string>{"mle", "js-rational"});
  CHECK(c.estimator_a == 1.5);
  CHECK(c.drift.kind == DriftKind::power2H);
  CHECK(c.drift.c == 2.0);
  CHECK(c.sweep_a == std::vector<double>{1, 2, 3});
  CHECK(c.stein_theta.size() == 5);
  CHECK(c.seed == 18446744073709551615ull);
}

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.model = FbmModel{4, 0.1 + 0.2, 1.0 / 3.0, 300};
  c.method = SimMethod::cholesky;
  c.estimators = {"js", "custom", "mle"};
  c.estimator_a = 0.7;
  c.custom_power = 2.5;
  c.custom_scale = 0.125;
  c.drift = DriftParams{DriftKind::custom, -1.25, 0.0, 1.75};
  c.n_reps = 1234;
  c.seed = 987654321;
  c.output_dir = "runs/a b";
  c.sweep_a = {0.1, 0.2, 0.30000000000000004};
  c.stein_t = 0.5;
  c.stein_theta = {3, 0, 0, 1e-300};
  c.stein_samples = 99;
  c.kernel_points = 7;
  c.simulate_replicate = 12;
  const auto text = to_config_text(c);
  CHECK(parse_config(text) == c);

  const auto dir = scratch_dir("roundtrip");
  fs::create_directories(dir);
  save_config(dir / "c.txt", c);
  CHECK(load_config(dir / "c.txt") == c);
  fs::remove_all(dir);
}

TEST_CASE("config errors name the key and line") {
  CHECK(error_of("hursst = 0.3\n").find("hursst") != std::string::npos);
  CHECK(error_of("model.d = 3\nmodel.H\n").find("cfg:2") != std::string::npos);
  const auto bad_value = error_of("model.d = 3\nmodel.H = quarter\n");
  CHECK(bad_value.find("cfg:2") != std::string::npos);
  CHECK(bad_value.find("model.H") != std::string::npos);
  CHECK(error_of("seed = 1\nseed = 2\n").find("twice") != std::string::npos);
  CHECK(error_of("method = wavelet\n").find("method") != std::string::npos);
  CHECK(error_of("estimator.labels = mle,ridge\n").find("ridge") != std::string::npos);
  CHECK(error_of("model.H = 1.5\n").find("H") != std::string::npos);
  CHECK(error_of("model.d = 3\nstein.theta = 1,2\n").find("stein.theta") != std::string::npos);
  CHECK(error_of("n_reps = -5\n").find("n_reps") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/fbmjs.cfg"), ConfigError);
}

TEST_CASE("number formatting and CSV quoting") {
  CHECK(format_number(0.25) == "0.25");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(2.0 / 3.0)) == 2.0 / 3.0);
  CHECK(csv_field("js(a=1)") == "js(a=1)");
  CHECK(csv_field("power2H(1,0.25)") == "\"power2H(1,0.25)\"");
}

TEST_CASE("simulate is deterministic and writes a manifest") {
  auto c = parse_config("model.H = 0.5\nmodel.n = 4\nmodel.d = 1\nseed = 3\n");
  c.output_dir = scratch_dir("simulate_a").string();
  std::ostringstream err;
  REQUIRE(run_subcommand("simulate", c, err) == 0);
  const auto first = slurp(fs::path(c.output_dir) / "path.csv");
  c.output_dir = scratch_dir("simulate_b").string();
  REQUIRE(run_subcommand("simulate", c, err) == 0);
  CHECK(slurp(fs::path(c.output_dir) / "path.csv") == first);

  std::istringstream rows(first);
  std::string line;
  std::size_t n = 0;
  while (std::getline(rows, line)) ++n;
  CHECK(n == 6);  // header + 5 grid points

  const auto manifest = slurp(fs::path(c.output_dir) / "manifest.txt");
  CHECK(manifest.find(kToolVersion) != std::string::npos);
  CHECK(manifest.find(to_config_text(c)) != std::string::npos);
  CHECK(manifest.find("path.csv rows=5") != std::string::npos);
  CHECK_FALSE(fs::exists(fs::path(c.output_dir) / "manifest.txt.tmp"));
  CHECK(load_config(fs::path(c.output_dir) / "config.txt") == c);
}

TEST_CASE("risk and dominance outputs are reproducible across thread counts") {
  auto c = parse_config(
      "model.n = 64\nn_reps = 600\nestimator.labels = mle,js\ndrift.kind = linear\nseed = 5\n");
  c.output_dir = scratch_dir("risk_a").string();
  std::ostringstream err;
  REQUIRE(run_subcommand("risk", c, err) == 0);
  REQUIRE(run_subcommand("dominance-sweep", c, err) == 0);
  const auto risk_a = slurp(fs::path(c.output_dir) / "risk.csv");
  const auto dom_a = slurp(fs::path(c.output_dir) / "dominance.csv");

  ::setenv("FBM_THREADS", "1", 1);
  c.output_dir = scratch_dir("risk_b").string();
  REQUIRE(run_subcommand("risk", c, err) == 0);
  REQUIRE(run_subcommand("dominance-sweep", c, err) == 0);
  ::unsetenv("FBM_THREADS");
  CHECK(slurp(fs::path(c.output_dir) / "risk.csv") == risk_a);
  CHECK(slurp(fs::path(c.output_dir) / "dominance.csv") == dom_a);

  CHECK(risk_a.rfind("estimator,drift,d,H,T,n,n_reps,seed,mean,std_error\n", 0) == 0);
  CHECK(dom_a.find("delta_mean,delta_std_error,ci95_upper,stein_form_mean,certified") != std::string::npos);
  const auto svg = slurp(fs::path(c.output_dir) / "dominance.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);  // zero line
}

TEST_CASE("other subcommands run") {
  std::ostringstream err;
  auto c = parse_config("model.n = 32\nn_reps = 200\nestimator.labels = js\nstein.n_samples = 1000\n"
                        "drift.kind = power2H\nmodel.d = 1\nkernel.points = 5\n");
  c.output_dir = scratch_dir("others").string();
  CHECK(run_subcommand("stein-check", c, err) == 0);
  CHECK(run_subcommand("kernel-table", c, err) == 0);
  CHECK(run_subcommand("girsanov-check", c, err) == 0);
  const fs::path out(c.output_dir);
  CHECK(fs::exists(out / "stein.csv"));
  CHECK(fs::exists(out / "girsanov.csv"));
  CHECK(fs::exists(out / "membership.csv"));
  const auto kernel = slurp(out / "kernel.csv");
  CHECK(std::count(kernel.begin(), kernel.end(), '\n') == 1 + 15);
}

TEST_CASE("exit status 1 on configuration errors") {
  std::ostringstream err;
  ExperimentConfig c;
  c.output_dir = scratch_dir("errors").string();
  CHECK(run_subcommand("dominance-sweep", c, err) == 1);  // only the MLE configured
  const auto msg = err.str();
  CHECK(msg.find("estimator.labels") != std::string::npos);
  CHECK(std::count(msg.begin(), msg.end(), '\n') == 1);
  std::ostringstream err2;
  c.model.H = 0.7;
  CHECK(run_subcommand("girsanov-check", c, err2) == 1);
  std::ostringstream err3;
  CHECK(run_subcommand("plot", ExperimentConfig{}, err3) == 1);
}
