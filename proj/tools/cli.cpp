#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "plap/expr.hpp"
#include "plap/quantities.hpp"
#include "plap/sphere.hpp"
#include "plap/tensors.hpp"

namespace plap::cli {

namespace {

using json = nlohmann::ordered_json;

/// Signals a usage error (exit 2) with a diagnostic.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct State {
  // shared
  std::string config;
  std::string out;
  std::string n = "3", p = "2", q = "4";
  unsigned long long seed = default_seed;
  int samples = -1;  ///< -1: command default
  double tol = -1;   ///< used only when tol_given
  bool tol_given = false;
  std::size_t grid = 0;  ///< 0: command default
  // params
  std::string expr;
  // check
  bool symbolic_n = false;
  std::string manifest;
  // solve
  double perturb = 0.2;
  int mode = 1;
  long max_steps = 1'000'000;
  bool exploratory = false;
  std::string flow = "mean_reflected";
  // sweep
  std::string p_min = "3/2", p_max = "5/2", p_step = "1/2";
  std::string q_min = "3/2", q_max = "6", q_step = "1/2";
  long exploratory_steps = 20'000;
  bool no_solve = false;
  // matrix-test
  int tensor_samples = 100;
};

Rational parse_rational(const std::string& name, const std::string& text) {
  try {
    return Rational::parse(text);
  } catch (const std::exception&) {
    throw UsageError("--" + name + ": not a rational number: '" + text + "'");
  }
}

ParamPoint point_of(const State& s) {
  ParamPoint pt;
  const auto n = parse_rational("n", s.n);
  if (!n.is_integer() || !n.raw().get_num().fits_slong_p()) throw UsageError("--n must be an integer");
  pt.n = n.raw().get_num().get_si();
  pt.p = parse_rational("p", s.p);
  pt.q = parse_rational("q", s.q);
  return pt;
}

std::string real(double x) { return format_real(x); }

json entry_json(const CheckEntry& e) {
  json j;
  j["id"] = e.id;
  j["reference"] = e.reference;
  j["status"] = std::string(to_string(e.status));
  j["residual"] = real(e.residual);
  j["witness"] = e.witness;
  return j;
}

/// Header first, then deterministic body fields.
json report_json(const std::string& command, const json& config, const CheckReport& report) {
  json doc;
  doc["header"] = {{"tool", "plap"}, {"version", version}, {"command", command}, {"config", config}};
  json entries = json::array();
  std::size_t exact = 0, pass = 0, fail = 0;
  for (const auto& e : report.sorted()) {
    entries.push_back(entry_json(e));
    if (e.status == CheckStatus::exact_zero) ++exact;
    else if (e.status == CheckStatus::pass) ++pass;
    else ++fail;
  }
  doc["entries"] = entries;
  doc["summary"] = {{"total", exact + pass + fail}, {"exact_zero", exact}, {"pass", pass}, {"fail", fail}};
  return doc;
}

void emit(RunOutput& r, const State& s, const std::string& text) {
  if (s.out.empty()) {
    r.out += text;
    return;
  }
  std::ofstream f(s.out, std::ios::binary);
  if (!f) throw UsageError("cannot write " + s.out);
  f << text;
}

void finish_report(RunOutput& r, const State& s, json doc, const CheckReport& report,
                   std::chrono::steady_clock::time_point t0) {
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  doc["header"]["config_file"] = s.config;
  doc["header"]["elapsed_s"] = real(elapsed);
  emit(r, s, doc.dump(2) + "\n");
  if (!report.passed()) {
    // worst offender: largest residual among failures, ties to the first id
    const auto entries = report.sorted();
    const CheckEntry* worst = nullptr;
    for (const auto& e : entries)
      if (e.status == CheckStatus::fail && (!worst || e.residual > worst->residual)) worst = &e;
    r.err += "FAIL " + worst->id + ": " + worst->witness + "\n";
    r.exit_code = 1;
  }
}

// --- commands ------------------------------------------------------------------

void cmd_params(RunOutput& r, const State& s) {
  const auto pt = point_of(s);
  Regime regime;
  try {
    regime = classify_regime(pt);
  } catch (const InadmissibleParams& e) {
    throw UsageError(e.what());
  }
  std::ostringstream os;
  os << "n=" << pt.n << "\np=" << pt.p.to_string() << "\nq=" << pt.q.to_string() << "\n";
  const auto basic = derive_basic(pt);
  os << "alpha=" << basic.alpha.to_string() << "\nlambda=" << basic.lambda.to_string() << "\n";
  if (regime == Regime::subcritical_window) {
    const auto d = derive_params(pt);
    os << "eps2=" << d.eps2.to_string() << "\nt=" << d.t.to_string() << "\n";
    os << "g_A=" << d.g.A.to_string() << "\ng_B=" << d.g.B.to_string() << "\ng_C=" << d.g.C.to_string() << "\n";
    os << "beta0=" << d.beta0.to_string() << "\na=" << d.a.to_string() << "\nk=" << d.k.to_string()
       << "\nM=" << d.M.to_string() << "\nomega_star=" << real(d.omega_star) << "\n";
  } else {
    os << "t=" << t_of(pt).to_string() << "\n";
    for (const char* name : {"eps2", "g_A", "g_B", "g_C", "beta0", "a", "k", "M", "omega_star"})
      os << name << "=undefined\n";
  }
  os << "regime=" << to_string(regime) << "\n";
  if (!s.expr.empty()) {
    Expr e;
    try {
      e = parse_expr(s.expr);
    } catch (const ParseError& err) {
      throw UsageError(std::string("--expr: ") + err.what());
    }
    os << "expr=" << print_expr(e) << "\n";
    try {
      os << "value=" << to_string(eval_numeric(e, pt)) << "\n";
    } catch (const EvalError& err) {
      os << "value=error\n";
      r.err += std::string("expression: ") + err.what() + "\n";
      r.exit_code = 1;
    }
  }
  emit(r, s, os.str());
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void cmd_check(RunOutput& r, const State& s, bool n_given) {
  const auto t0 = std::chrono::steady_clock::now();
  CertificationOptions opt;
  opt.symbolic_n = s.symbolic_n;
  if (s.samples >= 0) opt.positivity_samples = s.samples;
  opt.sampler.seed = s.seed;
  if (n_given) opt.fixed_n = {point_of(s).n};
  std::vector<ManifestLine> lines;
  if (!s.manifest.empty()) {
    try {
      lines = parse_manifest(read_file(s.manifest));
    } catch (const ParseError& e) {
      throw UsageError(s.manifest + ": " + e.what());
    }
  }
  auto report = run_certification(opt);
  if (s.symbolic_n) {
    report.merge(check_manifest(lines));
  } else {
    for (long n : opt.fixed_n) report.merge(check_manifest(lines, {false, n}));
  }
  json fixed = json::array();
  for (long n : opt.fixed_n) fixed.push_back(n);
  json config = {{"symbolic_n", s.symbolic_n}, {"fixed_n", s.symbolic_n ? json(nullptr) : fixed},
                 {"manifest", s.manifest}, {"samples", opt.positivity_samples}, {"seed", s.seed}};
  finish_report(r, s, report_json("check", config, report), report, t0);
}

FlowKind flow_of(const std::string& name) {
  if (name == "mean_reflected") return FlowKind::mean_reflected;
  if (name == "plain") return FlowKind::plain;
  throw UsageError("--flow must be mean_reflected or plain");
}

void cmd_solve(RunOutput& r, const State& s) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveConfig cfg;
  cfg.params = point_of(s);
  cfg.N = s.grid ? s.grid : 128;
  cfg.delta = s.perturb;
  cfg.mode = s.mode;
  cfg.max_steps = s.max_steps;
  cfg.exploratory = s.exploratory;
  if (s.tol_given) cfg.tol = s.tol;
  cfg.flow = flow_of(s.flow);
  if (cfg.N < 4) throw UsageError("--grid must be at least 4");
  SolveResult res;
  try {
    res = solve_flow(cfg);
  } catch (const OutOfWindow& e) {
    throw UsageError(std::string(e.what()) + " (--exploratory)");
  } catch (const InadmissibleParams& e) {
    throw UsageError(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string prefix = s.out.empty() ? "solve" : s.out;
  const std::string profile = prefix + "_profile.csv", convergence = prefix + "_convergence.csv";
  {
    std::ofstream f(profile, std::ios::binary);
    std::ofstream g(convergence, std::ios::binary);
    if (!f || !g) throw UsageError("cannot write " + prefix + "_*.csv");
    f << profile_csv(res);
    g << convergence_csv(res);
  }
  json doc;
  json config = {{"n", cfg.params.n},          {"p", cfg.params.p.to_string()}, {"q", cfg.params.q.to_string()},
                 {"grid", cfg.N},              {"perturb", real(cfg.delta)},    {"mode", cfg.mode},
                 {"tol", real(cfg.tol)},       {"dist_tol", real(cfg.dist_tol)}, {"max_steps", cfg.max_steps},
                 {"flow", std::string(to_string(cfg.flow))}, {"exploratory", cfg.exploratory}, {"out", prefix}};
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  doc["header"] = {{"tool", "plap"}, {"version", version}, {"command", "solve"}, {"config", config},
                   {"config_file", s.config}, {"elapsed_s", real(elapsed)}};
  doc["outcome"] = std::string(to_string(res.outcome));
  doc["exploratory"] = res.exploratory;
  doc["diverged"] = res.diverged;
  doc["steps"] = res.steps;
  doc["rejected"] = res.rejected;
  doc["residual_increases_after_transient"] = res.increases;
  doc["last_increase_step"] = res.last_increase_step;
  doc["residual_sup"] = real(res.residual);
  doc["dist_to_constant"] = real(res.distance);
  doc["omega_star"] = real(res.omega_star);
  doc["files"] = {profile, convergence};
  r.out += doc.dump(2) + "\n";
  if (res.outcome != Outcome::converged_to_constant && !res.exploratory) {
    r.err += "solve: outcome " + std::string(to_string(res.outcome)) + "\n";
    r.exit_code = 1;
  }
}

void cmd_sweep(RunOutput& r, const State& s) {
  SweepSpec spec;
  const auto n = parse_rational("n", s.n);
  if (!n.is_integer() || !n.raw().get_num().fits_slong_p()) throw UsageError("--n must be an integer");
  spec.n = n.raw().get_num().get_si();
  spec.p_min = parse_rational("p-min", s.p_min);
  spec.p_max = parse_rational("p-max", s.p_max);
  spec.p_step = parse_rational("p-step", s.p_step);
  spec.q_min = parse_rational("q-min", s.q_min);
  spec.q_max = parse_rational("q-max", s.q_max);
  spec.q_step = parse_rational("q-step", s.q_step);
  if (spec.p_step.sign() <= 0 || spec.q_step.sign() <= 0) throw UsageError("region steps must be positive");
  if (s.grid) spec.N = s.grid;
  if (spec.N < 4) throw UsageError("--grid must be at least 4");
  spec.max_steps = s.max_steps;
  spec.exploratory_max_steps = s.exploratory_steps;
  spec.solve = !s.no_solve;
  std::vector<SweepRow> rows;
  try {
    rows = sweep(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  emit(r, s, sweep_csv(rows));
  for (const auto& row : rows)
    if (row.regime == "subcritical_window" && spec.solve && row.outcome != "converged_to_constant") {
      r.err += "sweep: window point p=" + row.p.to_string() + " q=" + row.q.to_string() + " " + row.outcome + "\n";
      r.exit_code = 1;
    }
}

void cmd_calculus(RunOutput& r, const State& s) {
  const auto t0 = std::chrono::steady_clock::now();
  CalculusSuiteOptions opt;
  const auto pt = point_of(s);
  try {
    opt.params = CalculusParams::at_beta0(pt);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (s.grid) opt.N = s.grid;
  if (opt.N < 4) throw UsageError("--grid must be at least 4");
  if (s.samples >= 0) opt.samples = s.samples;
  if (s.tol_given) opt.tol = s.tol;
  opt.seed = s.seed;
  const auto report = run_calculus_suite(opt);
  json config = {{"n", pt.n},
                 {"p", pt.p.to_string()},
                 {"q", pt.q.to_string()},
                 {"beta", real(opt.params.beta)},
                 {"a", real(opt.params.a)},
                 {"n2eps2", real(opt.params.e2)},
                 {"grid", opt.N},
                 {"samples", opt.samples},
                 {"max_mode", opt.max_mode},
                 {"tol", real(opt.tol)},
                 {"seed", opt.seed}};
  finish_report(r, s, report_json("calculus-test", config, report), report, t0);
}

void cmd_matrix(RunOutput& r, const State& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const int samples = s.samples >= 0 ? s.samples : 10000;
  const double tol = s.tol_given ? s.tol : 1e-12;
  auto report = check_trace_inequality({2, 3, 4, 5, 6}, samples, s.seed, tol);
  TensorSuiteOptions topt;
  topt.samples = s.tensor_samples;
  topt.seed = s.seed;
  report.merge(run_tensor_suite(topt));
  json config = {{"samples", samples}, {"tensor_samples", topt.samples}, {"dims", {2, 3, 4, 5, 6}},
                 {"tensor_dims", {2, 3, 4}}, {"tol", real(tol)}, {"seed", s.seed}};
  finish_report(r, s, report_json("matrix-test", config, report), report, t0);
}

// --- argument parsing ----------------------------------------------------------

struct Parsed {
  std::unique_ptr<CLI::App> app;
  CLI::App* sub = nullptr;
};

Parsed build(State& s) {
  Parsed p;
  p.app = std::make_unique<CLI::App>("Exact and numerical checks for a quasilinear Liouville problem on spheres", "plap");
  auto& app = *p.app;
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", version);
  app.add_option("--config", s.config, "key=value file; command-line flags take precedence");

  auto point_opts = [&s](CLI::App* c, bool positional) {
    c->add_option(positional ? "n,--n" : "--n", s.n, "sphere dimension")->capture_default_str();
    c->add_option(positional ? "p,--p" : "--p", s.p, "exponent p (rational)")->capture_default_str();
    c->add_option(positional ? "q,--q" : "--q", s.q, "exponent q (rational)")->capture_default_str();
  };
  auto out_opt = [&s](CLI::App* c, const char* what) { c->add_option("--out", s.out, what); };

  auto* params = app.add_subcommand("params", "derived constants at (n, p, q)");
  point_opts(params, true);
  params->add_option("--expr", s.expr, "expression to evaluate at the point");
  out_opt(params, "write to FILE instead of stdout");

  auto* check = app.add_subcommand("check", "exact certification of the parameter choices");
  check->add_flag("--symbolic-n", s.symbolic_n, "keep n symbolic (default: fixed n = 3..8)");
  check->add_option("--manifest", s.manifest, "file of expressions asserted identically zero");
  check->add_option("--n", s.n, "single fixed n instead of 3..8");
  check->add_option("--samples", s.samples, "sampled positivity points (default 1000)");
  check->add_option("--seed", s.seed, "sampler seed")->capture_default_str();
  out_opt(check, "write the report to FILE");

  auto* solve = app.add_subcommand("solve", "pseudo-time flow to a steady state");
  point_opts(solve, false);
  solve->add_option("--grid", s.grid, "collocation intervals N (default 128)");
  solve->add_option("--perturb", s.perturb, "initial omega*(1 + perturb cos(mode theta))")->capture_default_str();
  solve->add_option("--mode", s.mode, "perturbation mode")->capture_default_str();
  solve->add_option("--tol", s.tol, "residual tolerance (default 1e-8)");
  solve->add_option("--max-steps", s.max_steps, "step budget")->capture_default_str();
  solve->add_option("--flow", s.flow, "mean_reflected or plain")->capture_default_str();
  solve->add_flag("--exploratory", s.exploratory, "allow points outside the subcritical window");
  out_opt(solve, "CSV prefix: PREFIX_profile.csv and PREFIX_convergence.csv (default solve)");

  auto* sw = app.add_subcommand("sweep", "regime map with solves at window points");
  sw->add_option("--n", s.n, "sphere dimension")->capture_default_str();
  sw->add_option("--p-min", s.p_min)->capture_default_str();
  sw->add_option("--p-max", s.p_max)->capture_default_str();
  sw->add_option("--p-step", s.p_step)->capture_default_str();
  sw->add_option("--q-min", s.q_min)->capture_default_str();
  sw->add_option("--q-max", s.q_max)->capture_default_str();
  sw->add_option("--q-step", s.q_step)->capture_default_str();
  sw->add_option("--grid", s.grid, "collocation intervals N (default 32)");
  sw->add_option("--max-steps", s.max_steps, "budget at window points")->capture_default_str();
  sw->add_option("--exploratory-steps", s.exploratory_steps, "budget outside the window")->capture_default_str();
  sw->add_flag("--no-solve", s.no_solve, "classify only");
  out_opt(sw, "write the CSV to FILE");

  auto* calc = app.add_subcommand("calculus-test", "integral identities on seeded random profiles");
  point_opts(calc, false);
  calc->add_option("--seed", s.seed)->capture_default_str();
  calc->add_option("--samples", s.samples, "profiles (default 20)");
  calc->add_option("--grid", s.grid, "collocation intervals N (default 256)");
  calc->add_option("--tol", s.tol, "relative defect tolerance (default 1e-8)");
  out_opt(calc, "write the report to FILE");

  auto* mat = app.add_subcommand("matrix-test", "trace inequality sampling and exact tensor decomposition");
  mat->add_option("--seed", s.seed)->capture_default_str();
  mat->add_option("--samples", s.samples, "inequality samples per dimension (default 10000)");
  mat->add_option("--tensor-samples", s.tensor_samples, "exact tensor points per dimension")->capture_default_str();
  mat->add_option("--tol", s.tol, "relative slack (default 1e-12)");
  out_opt(mat, "write the report to FILE");
  return p;
}

/// key=value lines, "#" comments; keys are long flag names without dashes.
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config " + path);
  std::vector<std::string> args;
  std::string line;
  int no = 0;
  while (std::getline(f, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(no) + ": expected key=value");
    auto trim = [](std::string x) {
      const auto a = x.find_first_not_of(" \t\r");
      const auto b = x.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
    };
    const auto key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") throw UsageError(path + ":" + std::to_string(no) + ": bad key");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

CLI::App* active(CLI::App& app) {
  for (auto* c : app.get_subcommands())
    if (c->parsed()) return c;
  return nullptr;
}

}  // namespace

RunOutput run(const std::vector<std::string>& args) {
  RunOutput r;
  State s;
  try {
    auto parsed = build(s);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
      parsed.app->parse(rev);
    } catch (const CLI::Success& e) {
      std::ostringstream os, es;
      r.exit_code = parsed.app->exit(e, os, es);
      r.out = os.str();
      return r;
    }
    auto* sub = active(*parsed.app);
    const std::string name = sub->get_name();
    bool n_given = sub->get_option_no_throw("--n") && sub->get_option("--n")->count() > 0;
    if (!s.config.empty()) {
      // config values go right after the command name so explicit flags, parsed later, win
      auto extra = config_args(s.config);
      std::vector<std::string> merged;
      bool inserted = false;
      for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        // drop --config itself: an option handed to the parent mid-stream reorders later results
        if (a == "--config") {
          ++i;
          continue;
        }
        if (a.rfind("--config=", 0) == 0) continue;
        merged.push_back(a);
        if (!inserted && a == name) {
          merged.insert(merged.end(), extra.begin(), extra.end());
          inserted = true;
        }
      }
      s = State{};
      parsed = build(s);
      std::vector<std::string> rev2(merged.rbegin(), merged.rend());
      parsed.app->parse(rev2);
      sub = active(*parsed.app);
      n_given = sub->get_option_no_throw("--n") && sub->get_option("--n")->count() > 0;
    }
    if (auto* t = sub->get_option_no_throw("--tol"); t && t->count() > 0) {
      s.tol_given = true;
      if (!(s.tol > 0)) throw UsageError("--tol must be positive");
    }
    if (s.samples < -1 || (s.samples < 0 && sub->get_option_no_throw("--samples") &&
                           sub->get_option("--samples")->count() > 0))
      throw UsageError("--samples must be non-negative");
    if (name == "params") cmd_params(r, s);
    else if (name == "check") cmd_check(r, s, n_given);
    else if (name == "solve") cmd_solve(r, s);
    else if (name == "sweep") cmd_sweep(r, s);
    else if (name == "calculus-test") cmd_calculus(r, s);
    else cmd_matrix(r, s);
  } catch (const CLI::ParseError& e) {
    r.err += std::string(e.what()) + "\n";
    r.exit_code = 2;
  } catch (const UsageError& e) {
    r.err += std::string(e.what()) + "\n";
    r.exit_code = 2;
  } catch (const std::exception& e) {
    r.err += std::string("error: ") + e.what() + "\n";
    r.exit_code = 1;
  }
  return r;
}

std::string report_body(const std::string& report_json) {
  auto doc = json::parse(report_json);
  doc.erase("header");
  return doc.dump(2);
}

}  // namespace plap::cli
