import json
from fractions import Fraction

import pytest

import plap_liouville as pl


def oracle(n, p, q):
    p, q = Fraction(p), Fraction(q)
    alpha = p / (q + 1 - p)
    lam = alpha * (n + 1 - alpha * q)
    return {"alpha": alpha, "lambda": lam, "t": (n + 1) / alpha}


@pytest.mark.parametrize("n,p,q", [(3, 2, 4), (3, Fraction(5, 2), 6), (4, Fraction(3, 2), Fraction(6, 5))])
def test_closed_forms_match_independent_fractions(n, p, q):
    d = pl.derived_params(n, p, q)
    for key, value in oracle(n, p, q).items():
        assert d[key] == value
    omega = float(d["lambda"] * d["alpha"] ** (Fraction(p) - 2)) ** (1 / float(Fraction(q) + 1 - Fraction(p)))
    assert d["omega_star"] == pytest.approx(omega, rel=1e-14)


def test_known_point():
    d = pl.derived_params(3, 2, 4)
    assert (d["beta0"], d["a"], d["k"], d["M"]) == (Fraction(-1, 3), -2, 2, Fraction(-3, 2))
    assert d["regime"] == "subcritical_window"
    assert pl.classify_regime(3, 2, 5) == "sobolev_critical"
    with pytest.raises(pl.OutOfWindow):
        pl.derived_params(3, 2, 5)
    with pytest.raises(pl.InadmissibleParams):
        pl.classify_regime(3, 4, 2)


def test_expressions():
    assert pl.eval_symbolic("t - (n+1)/alpha") == "0"
    assert pl.eval_numeric("alpha + 0.25", 3, 2, 4) == Fraction(11, 12)
    assert isinstance(pl.eval_numeric("omega_star", 3, 2, 4), float)
    with pytest.raises(pl.ParseError):
        pl.format_expr("p^(1/2)")


def test_certification_is_clean():
    entries = pl.certify(symbolic_n=True, samples=50)
    assert entries and all(e["status"] != "fail" for e in entries)
    assert [e["id"] for e in entries] == sorted(e["id"] for e in entries)


def test_suites_are_deterministic():
    a = pl.calculus_suite(seed=7, samples=3, grid=64)
    assert a == pl.calculus_suite(seed=7, samples=3, grid=64)
    assert all(e["status"] != "fail" for e in a)
    assert all(e["status"] != "fail" for e in pl.trace_inequality(dims=[2, 3], samples=200))


def test_solve_zero_perturbation_is_steady():
    r = pl.solve(grid=16, perturb=0.0)
    assert r["outcome"] == "converged_to_constant"
    assert r["steps"] == 0
    assert max(abs(x) for x in pl.pde_residual(3, 2, 4, r["omega"])) < 1e-10
    with pytest.raises(pl.OutOfWindow):
        pl.solve(q=5, grid=16)


def test_sweep_and_cli():
    csv = pl.sweep_csv(grid=16, solve=False)
    assert csv.splitlines()[0] == "p,q,lambda,regime,outcome,final_residual"
    assert len(csv.splitlines()) == 31
    code, out, _ = pl.run_cli(["check", "--symbolic-n", "--samples", "20"])
    assert code == 0
    assert json.loads(out)["summary"]["fail"] == 0
    assert pl.run_cli(["params", "3", "4", "2"])[0] == 2
