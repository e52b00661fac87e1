#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "cli.hpp"
#include "doctest.h"

using plap::cli::run;
using plap::cli::report_body;

namespace {

namespace fs = std::filesystem;

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("plap_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path;
}

bool has_line(const std::string& text, const std::string& line) {
  return ("\n" + text).find("\n" + line + "\n") != std::string::npos;
}

}  // namespace

TEST_CASE("params at (3, 2, 4)") {
  const auto r = run({"params", "3", "2", "4"});
  CHECK(r.exit_code == 0);
  for (const char* line : {"alpha=2/3", "lambda=8/9", "eps2=1/36", "t=6", "beta0=-1/3", "a=-2", "k=2", "M=-3/2",
                           "g_A=-9", "g_B=-6", "g_C=-1", "regime=subcritical_window"}) {
    INFO(line);
    CHECK(has_line(r.out, line));
  }
  CHECK(r.out.find("omega_star=0.9614997") != std::string::npos);
  CHECK(run({"params", "--n", "3", "--p", "2", "--q", "4"}).out == r.out);
}

TEST_CASE("params regimes and usage errors") {
  CHECK(has_line(run({"params", "3", "2", "5"}).out, "regime=sobolev_critical"));
  const auto bad = run({"params", "3", "4", "2"});
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("p < n violated") != std::string::npos);
  CHECK(run({"params", "3", "x", "2"}).exit_code == 2);
  CHECK(run({"frobnicate"}).exit_code == 2);
  CHECK(run({}).exit_code == 2);
  CHECK(run({"--help"}).exit_code == 0);
}

TEST_CASE("params --expr") {
  const auto r = run({"params", "3", "2", "4", "--expr", "t - (n+1)/alpha"});
  CHECK(r.exit_code == 0);
  CHECK(has_line(r.out, "value=0"));
  CHECK(run({"params", "3", "2", "4", "--expr", "p//q"}).exit_code == 2);
  CHECK(run({"params", "3", "2", "4", "--expr", "1/(p-2)"}).exit_code == 1);
}

TEST_CASE("check: default and symbolic runs pass") {
  const auto fixed = run({"check", "--n", "3", "--samples", "50"});
  CHECK(fixed.exit_code == 0);
  CHECK(fixed.out.find("\"fail\": 0") != std::string::npos);
  const auto sym = run({"check", "--symbolic-n", "--samples", "50"});
  CHECK(sym.exit_code == 0);
  CHECK(sym.out.find("g.discriminant") != std::string::npos);
}

TEST_CASE("check --manifest") {
  const auto good = write("good.txt", "# closed form of t\nt - (n+1)/alpha\n");
  CHECK(run({"check", "--symbolic-n", "--samples", "10", "--manifest", good.string()}).exit_code == 0);
  const auto bad = write("bad.txt", "lambda - 1\n");
  const auto r = run({"check", "--symbolic-n", "--samples", "10", "--manifest", bad.string()});
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("manifest.line0001") != std::string::npos);
  const auto broken = write("broken.txt", "p//q\n");
  CHECK(run({"check", "--manifest", broken.string()}).exit_code == 2);
  CHECK(run({"check", "--manifest", (scratch() / "missing.txt").string()}).exit_code == 2);
}

TEST_CASE("solve guards and the zero perturbation") {
  const auto guard = run({"solve", "--n", "3", "--p", "2", "--q", "5"});
  CHECK(guard.exit_code == 2);
  CHECK(guard.err.find("not in subcritical window") != std::string::npos);
  const auto prefix = (scratch() / "zero").string();
  const auto r = run({"solve", "--perturb", "0", "--grid", "16", "--out", prefix});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"steps\": 0") != std::string::npos);
  CHECK(r.out.find("converged_to_constant") != std::string::npos);
  CHECK(fs::exists(prefix + "_profile.csv"));
  CHECK(fs::exists(prefix + "_convergence.csv"));
  const auto expl =
      run({"solve", "--q", "5", "--exploratory", "--grid", "16", "--max-steps", "200", "--out", prefix + "_x"});
  CHECK(expl.exit_code == 0);
  CHECK(run({"solve", "--tol", "0"}).exit_code == 2);
  CHECK(run({"solve", "--flow", "sideways"}).exit_code == 2);
}

TEST_CASE("sweep CSV, empty region and malformed region") {
  const auto r = run({"sweep", "--no-solve"});
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("p,q,lambda,regime,outcome,final_residual\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 31);
  CHECK(r.out.find("2,3/2,-8,lambda_negative,not_attempted") != std::string::npos);
  const auto empty = run({"sweep", "--q-min", "7"});
  CHECK(empty.exit_code == 0);
  CHECK(empty.out == "p,q,lambda,regime,outcome,final_residual\n");
  CHECK(run({"sweep", "--p-step", "0"}).exit_code == 2);
  CHECK(run({"sweep", "--q-max", "six"}).exit_code == 2);
}

TEST_CASE("calculus-test and matrix-test are deterministic") {
  const auto a = run({"calculus-test", "--seed", "7", "--samples", "5", "--grid", "128"});
  const auto b = run({"calculus-test", "--seed", "7", "--samples", "5", "--grid", "128"});
  CHECK(a.exit_code == 0);
  CHECK(report_body(a.out) == report_body(b.out));
  CHECK(report_body(a.out) != report_body(run({"calculus-test", "--seed", "8", "--samples", "5", "--grid", "128"}).out));
  const auto m1 = run({"matrix-test", "--seed", "7", "--samples", "500", "--tensor-samples", "5"});
  const auto m2 = run({"matrix-test", "--seed", "7", "--samples", "500", "--tensor-samples", "5"});
  CHECK(m1.exit_code == 0);
  CHECK(report_body(m1.out) == report_body(m2.out));
}

TEST_CASE("a tight tolerance fails with the worst offender") {
  const auto r = run({"calculus-test", "--samples", "2", "--grid", "64", "--tol", "1e-20"});
  CHECK(r.exit_code == 1);
  CHECK(r.err.rfind("FAIL calculus.", 0) == 0);
}

TEST_CASE("config file precedence: flag over config over default") {
  const auto cfg = write("run.cfg", "# shared settings\ngrid = 64\nsamples=3\n");
  const auto from_cfg = run({"calculus-test", "--config", cfg.string()});
  CHECK(from_cfg.out.find("\"grid\": 64") != std::string::npos);
  CHECK(from_cfg.out.find("\"samples\": 3") != std::string::npos);
  const auto flag = run({"calculus-test", "--config", cfg.string(), "--samples", "2"});
  CHECK(flag.out.find("\"samples\": 2") != std::string::npos);
  CHECK(flag.out.find("\"grid\": 64") != std::string::npos);
  const auto before = run({"calculus-test", "--samples", "2", "--config", cfg.string()});
  CHECK(report_body(before.out) == report_body(flag.out));
  const auto bad = write("bad.cfg", "no equals sign\n");
  CHECK(run({"calculus-test", "--config", bad.string()}).exit_code == 2);
  const auto unknown = write("unknown.cfg", "colour=blue\n");
  CHECK(run({"calculus-test", "--config", unknown.string()}).exit_code == 2);
}
