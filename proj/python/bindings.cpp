#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "plap/expr.hpp"
#include "plap/quantities.hpp"
#include "plap/sphere.hpp"
#include "plap/tensors.hpp"

namespace py = pybind11;
using namespace plap;

namespace {

ParamPoint point(long n, const std::string& p, const std::string& q) {
  ParamPoint pt;
  pt.n = n;
  pt.p = Rational::parse(p);
  pt.q = Rational::parse(q);
  return pt;
}

py::list entries(const CheckReport& report) {
  py::list out;
  for (const auto& e : report.sorted()) {
    py::dict d;
    d["id"] = e.id;
    d["reference"] = e.reference;
    d["status"] = std::string(to_string(e.status));
    d["residual"] = e.residual;
    d["witness"] = e.witness;
    out.append(d);
  }
  return out;
}

// Rationals cross the boundary as "num/den" strings; the package wraps them in Fraction.
py::dict derived(long n, const std::string& p, const std::string& q) {
  const auto d = derive_params(point(n, p, q));
  py::dict out;
  out["alpha"] = d.alpha.to_string();
  out["lambda"] = d.lambda.to_string();
  out["eps2"] = d.eps2.to_string();
  out["t"] = d.t.to_string();
  out["g_A"] = d.g.A.to_string();
  out["g_B"] = d.g.B.to_string();
  out["g_C"] = d.g.C.to_string();
  out["beta0"] = d.beta0.to_string();
  out["a"] = d.a.to_string();
  out["k"] = d.k.to_string();
  out["M"] = d.M.to_string();
  out["omega_star"] = d.omega_star;
  out["regime"] = std::string(to_string(d.regime));
  return out;
}

py::dict solve(long n, const std::string& p, const std::string& q, std::size_t grid, double perturb, int mode,
               long max_steps, bool exploratory, const std::string& flow) {
  SolveConfig cfg;
  cfg.params = point(n, p, q);
  cfg.N = grid;
  cfg.delta = perturb;
  cfg.mode = mode;
  cfg.max_steps = max_steps;
  cfg.exploratory = exploratory;
  if (flow == "plain") cfg.flow = FlowKind::plain;
  else if (flow != "mean_reflected") throw py::value_error("flow must be mean_reflected or plain");
  SolveResult r;
  {
    py::gil_scoped_release release;
    r = solve_flow(cfg);
  }
  py::dict out;
  out["theta"] = r.theta;
  out["omega"] = r.omega;
  py::list history;
  for (const auto& h : r.history) history.append(py::make_tuple(h.step, h.residual_sup, h.dist_to_constant));
  out["history"] = history;
  out["outcome"] = std::string(to_string(r.outcome));
  out["steps"] = r.steps;
  out["residual"] = r.residual;
  out["distance"] = r.distance;
  out["omega_star"] = r.omega_star;
  out["exploratory"] = r.exploratory;
  out["diverged"] = r.diverged;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact identity checks and an axisymmetric solver for a quasilinear Liouville problem on spheres";

  py::register_exception<InadmissibleParams>(m, "InadmissibleParams", PyExc_ValueError);
  py::register_exception<OutOfWindow>(m, "OutOfWindow", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_ArithmeticError);

  m.def(
      "classify_regime",
      [](long n, const std::string& p, const std::string& q) { return std::string(to_string(classify_regime(point(n, p, q)))); },
      py::arg("n"), py::arg("p"), py::arg("q"));
  m.def("derived_params", &derived, py::arg("n"), py::arg("p"), py::arg("q"));

  m.def(
      "certify",
      [](bool symbolic_n, int samples) {
        CertificationOptions opt;
        opt.symbolic_n = symbolic_n;
        opt.positivity_samples = samples;
        CheckReport r;
        {
          py::gil_scoped_release release;
          r = run_certification(opt);
        }
        return entries(r);
      },
      py::arg("symbolic_n") = true, py::arg("samples") = 1000);

  m.def(
      "eval_numeric",
      [](const std::string& text, long n, const std::string& p, const std::string& q) -> py::object {
        const auto v = eval_numeric(parse_expr(text), point(n, p, q));
        if (std::holds_alternative<double>(v)) return py::float_(std::get<double>(v));
        return py::str(std::get<Rational>(v).to_string());
      },
      py::arg("expr"), py::arg("n"), py::arg("p"), py::arg("q"));
  m.def(
      "eval_symbolic",
      [](const std::string& text) { return eval_symbolic(parse_expr(text)).to_string(); }, py::arg("expr"));
  m.def("format_expr", [](const std::string& text) { return print_expr(parse_expr(text)); }, py::arg("expr"));

  m.def("solve", &solve, py::arg("n") = 3, py::arg("p") = "2", py::arg("q") = "4", py::arg("grid") = 128,
        py::arg("perturb") = 0.2, py::arg("mode") = 1, py::arg("max_steps") = 1'000'000,
        py::arg("exploratory") = false, py::arg("flow") = "mean_reflected");

  m.def(
      "pde_residual",
      [](long n, const std::string& p, const std::string& q, const std::vector<double>& omega) {
        const auto grid = SphereGrid::make(n, omega.size() - 1);
        return pde_residual(grid, omega, point(n, p, q));
      },
      py::arg("n"), py::arg("p"), py::arg("q"), py::arg("omega"));

  m.def(
      "calculus_suite",
      [](std::uint64_t seed, int samples, std::size_t grid) {
        CalculusSuiteOptions opt;
        opt.seed = seed;
        opt.samples = samples;
        opt.N = grid;
        CheckReport r;
        {
          py::gil_scoped_release release;
          r = run_calculus_suite(opt);
        }
        return entries(r);
      },
      py::arg("seed") = 7, py::arg("samples") = 20, py::arg("grid") = 256);

  m.def(
      "trace_inequality",
      [](const std::vector<std::size_t>& dims, int samples, std::uint64_t seed) {
        CheckReport r;
        {
          py::gil_scoped_release release;
          r = check_trace_inequality(dims, samples, seed);
        }
        return entries(r);
      },
      py::arg("dims") = std::vector<std::size_t>{2, 3, 4, 5, 6}, py::arg("samples") = 10000, py::arg("seed") = 7);

  m.def(
      "tensor_suite",
      [](int samples, std::uint64_t seed, bool symbolic_p) {
        TensorSuiteOptions opt;
        opt.samples = samples;
        opt.seed = seed;
        opt.symbolic_p = symbolic_p;
        CheckReport r;
        {
          py::gil_scoped_release release;
          r = run_tensor_suite(opt);
        }
        return entries(r);
      },
      py::arg("samples") = 100, py::arg("seed") = 0x54454E53ULL, py::arg("symbolic_p") = false);

  m.def(
      "sweep_csv",
      [](long n, std::size_t grid, bool solve) {
        SweepSpec spec;
        spec.n = n;
        spec.N = grid;
        spec.solve = solve;
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = sweep(spec);
        }
        return sweep_csv(rows);
      },
      py::arg("n") = 3, py::arg("grid") = 32, py::arg("solve") = false);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        cli::RunOutput r;
        {
          py::gil_scoped_release release;
          r = cli::run(args);
        }
        return py::make_tuple(r.exit_code, r.out, r.err);
      },
      py::arg("args"), "Runs a plap command line in-process; returns (exit_code, stdout, stderr).");

  m.attr("__version__") = cli::version;
}
