"""Acceptance criteria, one group of tests per criterion.

Each test carries ``@pytest.mark.criterion(n)``; the terminal summary prints
one PASS/FAIL line per criterion.
"""
import math
import subprocess
import sys
import time

import pytest

from ch3lab.models import POTENTIAL_V, f_rules, get_model
from ch3lab.multivec import jacobi_check, scalar_op, scalar_space
from ch3lab.numeric import Grid, biham_residual, gateaux_check, smooth_state
from ch3lab.numeric.checks import (NumericConfig, _direction, self_convergence,
                                   transform_runs)
from ch3lab.opalg import is_skew_adjoint, op_apply
from ch3lab.symcore import reduce_modulo, to_text
from ch3lab.verify import (check_conservation, check_jacobi, check_negative_flow,
                           check_reciprocal_derivation, check_reduction, check_skew,
                           check_transformed_zero_curvature, check_zero_curvature,
                           reciprocal_identities)

CFG = NumericConfig()


def _note(request, text):
    request.node.user_properties.append(("summary", text))


# 1 -----------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_c1_zero_curvature_exact(request):
    t0 = time.perf_counter()
    r = check_zero_curvature("ch3")
    dt = time.perf_counter() - t0
    assert r.status == "pass", r.residual
    assert r.residual == "0"
    assert dt <= 60
    _note(request, f"ZC residual 0 in {dt:.2f}s")


@pytest.mark.criterion(1)
def test_c1_perturbed_entry_fails(request):
    r = check_zero_curvature("ch3", perturb=[2, 1, "lam"])
    assert r.status == "fail"
    _note(request, "perturbed control fails")


# 2 -----------------------------------------------------------------------

@pytest.mark.criterion(2)
def test_c2_conservation_law(request):
    r = check_conservation("ch3", density="s^2", flux="s^2*q")
    assert r.status == "pass" and r.residual == "0"
    _note(request, "D_t(v^1/2) - D_x(v^1/2 q) = 0")


@pytest.mark.criterion(2)
def test_c2_v_density_control_residual(request):
    m = get_model("ch3")
    r = check_conservation("ch3", density="v", flux="v*q")
    assert r.status == "fail"
    assert r.residual == to_text(m.jet.parse("v*q_x"))
    _note(request, f"v-density residual {r.residual}")


# 3 -----------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_c3_reciprocal_subidentities(request):
    res = reciprocal_identities()
    for key in ("gauge", "factorization", "potential", "link"):
        assert res[key].is_zero(), f"{key}: {to_text(res[key])}"
    assert check_reciprocal_derivation("ch3").status == "pass"
    _note(request, "gauge, factorization, potential, link all 0")


@pytest.mark.criterion(3)
def test_c3_potential_matches_v_form():
    res = reciprocal_identities()
    Y = res["_jet"]
    pot_v = Y.parse(POTENTIAL_V)
    diff = Y.substitute(pot_v, {"v": Y.parse("s^4")}) - res["_pot"]
    assert diff.is_zero()


# 4 -----------------------------------------------------------------------

@pytest.mark.criterion(4)
def test_c4_transformed_zero_curvature(request):
    r = check_transformed_zero_curvature("mkdv3")
    assert r.status == "pass" and r.residual == "0"
    _note(request, "transformed ZC 0")


@pytest.mark.criterion(4)
@pytest.mark.parametrize("rule", ["a", "b", "c"])
def test_c4_each_f_rule_needed(rule):
    r = check_transformed_zero_curvature("mkdv3", disable=[rule])
    assert r.status == "fail" and r.residual != "0"


# 5 -----------------------------------------------------------------------

@pytest.mark.criterion(5)
@pytest.mark.parametrize("model,op", [("ch3", "J1"), ("mkdv3", "K1"), ("mkdv3", "K2"),
                                      ("mkdv3", "pencil")])
def test_c5_skew(model, op):
    assert check_skew(model, op).status == "pass"


@pytest.mark.criterion(5)
def test_c5_pencil_jacobi_graded(request):
    t0 = time.perf_counter()
    r = check_jacobi("mkdv3", "pencil")
    dt = time.perf_counter() - t0
    assert r.status == "pass" and r.residual == "0"
    for g in ("alpha^2", "alpha*beta", "beta^2"):
        assert r.details[g] == "0"
    assert dt <= 600
    _note(request, f"pencil Jacobi graded parts 0 in {dt:.1f}s")


@pytest.mark.criterion(5)
def test_c5_valid_controls_fail(request):
    S = scalar_space()
    assert jacobi_check(scalar_op(S, [("2*v_x", 1), ("v_xx", 0)]), ["v"]).status == "fail"
    _note(request, "v_x D + D v_x fails Jacobi")


@pytest.mark.criterion(5)
def test_c5_literal_control_v2(request):
    # v^2 D + D v^2 = 2 v^2 D + 2 v v_x; a one-component operator of
    # hydrodynamic type, so the Jacobi identity may well hold
    S = scalar_space()
    r = jacobi_check(scalar_op(S, [("2*v^2", 1), ("2*v*v_x", 0)]), ["v"])
    _note(request, f"v^2 D + D v^2 Jacobi status: {r.status}")
    assert r.status == "fail", "v^2 D + D v^2 satisfies the Jacobi identity"


# 6 -----------------------------------------------------------------------

@pytest.mark.criterion(6)
def test_c6_negative_flow(request):
    m = get_model("mkdv3")
    jet = m.jet
    ABC = list(m.extras["ABC"])
    for a, v in zip(op_apply(m.operators["K1"], ABC), m.variables):
        assert (a - m.evolution[v]).is_zero()
    K2v = op_apply(m.operators["K2"], ABC)
    for a, g in zip(K2v, m.extras["G"]):
        assert (a - g).is_zero()
    R = f_rules(jet, dict(m.extras["F"]))
    # Xi_y lies in the constraint ideal, so Xi may be set to zero afterwards
    assert reduce_modulo(jet.gens["Xi"].rule, R, jet).is_zero()
    for a in K2v:
        r = reduce_modulo(jet.substitute(reduce_modulo(a, R, jet), {"Xi": 0}), R, jet)
        assert r.is_zero(), to_text(r)
    assert check_negative_flow("mkdv3").status == "pass"
    _note(request, "K1(A,B,C) = flow; K2(A,B,C) = G = 0 mod F")


# 7 -----------------------------------------------------------------------

@pytest.mark.criterion(7)
@pytest.mark.parametrize("name", ["ch", "gx", "novikov"])
def test_c7_reductions(request, name):
    m = get_model(name)
    assert check_zero_curvature(m).status == "pass"
    for op in sorted(m.operators):
        assert is_skew_adjoint(m.operators[op]).status == "pass", op
    assert check_reduction(name).status == "pass"
    _note(request, f"{name}: ZC and skew ({', '.join(sorted(m.operators))})")


# 8 -----------------------------------------------------------------------

@pytest.mark.slow
@pytest.mark.criterion(8)
def test_c8_biham_residuals(request):
    res = {}
    for N in (256, 512):
        st = smooth_state(Grid(N), CFG.seed, CFG.amplitude, CFG.decay, CFG.biham_kmax)
        res[N] = biham_residual(st)
    for key in ("J1_H1", "J2_H0"):
        assert res[256][key] <= 1e-6
        assert res[512][key] < res[256][key]
    assert max(res[256]["discarded_mean_D3-4D"], res[256]["discarded_mean_D"]) <= 1e-8
    _note(request, "J1 {:.1e}->{:.1e}, J2 {:.1e}->{:.1e}".format(
        res[256]["J1_H1"], res[512]["J1_H1"], res[256]["J2_H0"], res[512]["J2_H0"]))


@pytest.mark.slow
@pytest.mark.criterion(8)
def test_c8_gradient_order(request):
    g = Grid(256)
    st = smooth_state(g, CFG.seed, CFG.amplitude, CFG.decay, CFG.kmax)
    d = _direction(g, CFG.seed)
    eps = (0.1, 0.05, 0.025, 0.0125)
    e1 = [gateaux_check(st, "H1", d, e) for e in eps]
    orders = [math.log2(e1[i] / e1[i + 1]) for i in range(3)]
    assert min(orders) >= 1.9
    # H0 is quadratic: the central difference has no truncation error
    e0 = [gateaux_check(st, "H0", d, e) for e in eps]
    assert max(e0) <= 1e-10
    _note(request, f"H1 order {min(orders):.3f}, H0 err {max(e0):.1e}")


# 9 -----------------------------------------------------------------------

@pytest.fixture(scope="module")
def runs():
    return transform_runs(CFG)


@pytest.mark.slow
@pytest.mark.criterion(9)
def test_c9_run_configuration(runs):
    assert (runs["base"].N, runs["base"].dt, CFG.T) == (256, 1e-3, 0.5)
    assert (runs["refined"].N, runs["refined"].dt) == (512, 5e-4)


@pytest.mark.slow
@pytest.mark.criterion(9)
def test_c9_constraints(request, runs):
    a, b = runs["base"].residual["F"], runs["refined"].residual["F"]
    for k in ("F1", "F2", "F3"):
        assert a[k] <= 1e-4
        assert b[k] < a[k]
    _note(request, "F max {:.1e}->{:.1e}".format(max(a.values()), max(b.values())))


@pytest.mark.slow
@pytest.mark.criterion(9)
def test_c9_evolution(request, runs):
    a, b = runs["base"].residual["evolution"], runs["refined"].residual["evolution"]
    for k in ("Q1", "Q2", "Q3"):
        assert a[k] <= 1e-4
        assert b[k] < a[k]
    _note(request, "evolution max {:.1e}->{:.1e}".format(max(a.values()), max(b.values())))


@pytest.mark.slow
@pytest.mark.criterion(9)
def test_c9_drift(request, runs):
    drift = runs["base"].drift
    assert set(drift) == {"H0", "H1", "Iv"}
    assert max(drift.values()) <= 1e-8
    _note(request, f"drift {max(drift.values()):.1e}")


@pytest.mark.slow
@pytest.mark.criterion(9)
def test_c9_time_order(request):
    r = self_convergence(CFG)
    assert abs(r["order"] - 4) <= 0.3
    _note(request, f"RK order {r['order']:.3f}")


# 10 ----------------------------------------------------------------------

@pytest.mark.slow
@pytest.mark.criterion(10)
def test_c10_byte_identical_reports(request, tmp_path):
    outs = []
    for tag in ("a", "b"):
        d = tmp_path / tag
        p = subprocess.run([sys.executable, "-m", "ch3lab.cli", "suite", "--out", str(d)],
                           capture_output=True, text=True)
        assert p.returncode == 0, p.stderr + p.stdout
        outs.append((d / "report.json").read_bytes())
    assert outs[0] == outs[1]
    _note(request, f"report.json identical ({len(outs[0])} bytes)")
