import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ch3lab.models import get_model
from ch3lab.numeric import (FieldState, Grid, NumericError, SimConfig, biham_residual,
                            conserved_quantities, gateaux_check, helmholtz_solve, rhs_eval,
                            simulate, smooth_state, stationary_state)
from ch3lab.numeric.evaluate import FieldEnv, evaluate
from ch3lab.numeric.grid import SYMBOLS
from ch3lab.numeric.output import read_fields_csv, write_fields_csv
from ch3lab.numeric.system import random_fields
from ch3lab.numeric.transform import YMap, f_norms, reciprocal_map, transformed_evolution_residual

G = Grid(64)
seeds = st.integers(0, 10_000)


@given(st.integers(1, 31), st.integers(1, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_spectral_derivative_exact_on_modes(k, n, a, b):
    x = G.x
    f = a * np.cos(k * x) + b * np.sin(k * x)
    # d^n/dx^n of e^{ikx} is (ik)^n e^{ikx}
    z = (1j * k) ** n
    want = (a * z * np.exp(1j * k * x)).real + (b * z * np.exp(1j * k * x)).imag
    assert np.allclose(G.diff(f, n), want, atol=1e-9 * k ** n)


@given(seeds, st.sampled_from(["1-D2", "D2-1", "D2-4"]))
def test_helmholtz_roundtrip(seed, op):
    (f,) = random_fields(G, seed, 1, 1.0, 0.3, 20)
    f = f + 0.3
    sol = helmholtz_solve(G, f, op)
    assert np.allclose(G.apply_symbol(sol, SYMBOLS[op]), f, atol=1e-12)


@given(seeds)
def test_odd_inverse_on_zero_mean(seed):
    (f,) = random_fields(G, seed, 1, 1.0, 0.3, 20)
    info = []
    sol = helmholtz_solve(G, f, "D3-4D", info=info)
    assert np.allclose(G.apply_symbol(sol, SYMBOLS["D3-4D"]), f, atol=1e-12)
    assert abs(info[0].discarded_mean) < 1e-12


def test_odd_inverse_rejects_mean():
    f = np.ones(G.N)
    with pytest.raises(NumericError):
        helmholtz_solve(G, f, "D3-4D")
    info = []
    helmholtz_solve(G, f, "D3-4D", info=info, project=True)
    assert info[0].discarded_mean == pytest.approx(1.0)


def test_unknown_symbol():
    with pytest.raises(ValueError):
        helmholtz_solve(G, np.zeros(G.N), "D5")


@given(seeds)
def test_first_order_collocation_solve(seed):
    (h,) = random_fields(G, seed, 1, 0.2, 0.3, 10)
    Q1 = 1.0 + h
    g = helmholtz_solve(G, np.full(G.N, -2.0), "Dy-2Q1", Q1=Q1)
    assert np.max(np.abs(G.diff(g) - 2 * Q1 * g + 2)) < 1e-10


@given(seeds)
def test_antiderivative(seed):
    (f,) = random_fields(G, seed, 1, 1.0, 0.3, 20)
    F = G.antiderivative(f)
    assert np.allclose(G.diff(F), f - f.mean(), atol=1e-12)
    assert abs(F.mean()) < 1e-12


@given(seeds, st.lists(st.floats(-10, 10), min_size=1, max_size=8))
def test_interpolation_exact_for_resolved_polynomials(seed, pts):
    (f,) = random_fields(G, seed, 1, 1.0, 0.3, 20)
    assert np.allclose(G.interpolate(f, G.x), f, atol=1e-12)
    pts = np.array(pts)
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(2, 5))
    ks = np.arange(1, 6)
    poly = lambda x: np.cos(np.outer(x, ks)) @ a + np.sin(np.outer(x, ks)) @ b
    assert np.allclose(G.interpolate(poly(G.x), pts), poly(pts), atol=1e-11)


def test_grid_validation():
    for N in (8, 100):
        with pytest.raises(ValueError):
            Grid(N)
    with pytest.raises(ValueError):
        Grid(64, -1.0)


@given(seeds)
def test_uvw_to_pqr_roundtrip(seed):
    s = smooth_state(G, seed, 0.05, 0.5, 12)
    back = FieldState.from_uvw(G, s.u, s.v, s.w)
    for n in "pqr":
        assert np.allclose(getattr(back, n), getattr(s, n), atol=1e-11)


def test_evaluate_matches_numpy():
    m = get_model("ch3")
    s = smooth_state(G, 1, 0.05, 0.5, 12)
    E = m.jet.parse("p_x*q^2 - 3/2*r_xx")
    want = G.diff(s.p) * s.q ** 2 - 1.5 * G.diff(s.r, 2)
    assert np.allclose(evaluate(E, s.env()), want, atol=1e-12)


def test_evaluate_caches_derivatives():
    env = FieldEnv(G, {"a": np.sin(G.x)})
    assert env.get("a", 2) is env.get("a", 2)


def test_stationary_state_is_stationary():
    s = stationary_state(G)
    rates = rhs_eval(s)
    for v in rates.values():
        assert np.max(np.abs(v)) < 1e-14


def test_simulate_conserves_and_tracks_origin():
    s = smooth_state(G, 2, 0.05, 0.5, 10)
    tr = simulate(SimConfig(G, 0.01, 0.2), s)
    assert len(tr.snapshots) == 21
    assert max(tr.diagnostics["drift"].values()) < 1e-10
    assert tr.snapshots[0].Y0 == 0.0
    assert tr.snapshots[-1].Y0 != 0.0


def test_simconfig_validation():
    with pytest.raises(ValueError):
        SimConfig(G, 0.03, 0.1).steps
    with pytest.raises(ValueError):
        SimConfig(G, -0.01, 0.1)


def test_conserved_quantities_of_constant_state():
    s = stationary_state(G, -0.5)
    c = conserved_quantities(s)
    # v = -2 q0 = 1, so Iv is the period
    assert c["Iv"] == pytest.approx(G.L)


@given(seeds)
def test_ymap_inverse(seed):
    s = smooth_state(G, seed, 0.05, 0.5, 12)
    ym = YMap(s, Y0=0.3)
    assert ym.period == pytest.approx(np.mean(np.sqrt(s.v)) * G.L)
    ys = np.linspace(0.3, 0.3 + ym.period, 17)
    assert np.allclose(ym(ym.inverse(ys)), ys, atol=1e-12)
    assert ym(np.zeros(1))[0] == pytest.approx(0.3)


def test_reciprocal_map_satisfies_constraints():
    g = Grid(128)
    s = smooth_state(g, 4, 0.05, 0.5, 12)
    ts = reciprocal_map(s)
    assert max(f_norms(ts).values()) < 1e-8
    assert ts.diagnostics["g_minus_s2"] < 1e-8
    assert abs(ts.diagnostics["f_integrand_mean"]) < 1e-12
    assert abs(ts.diagnostics["k_integrand_mean"]) < 1e-12


def test_reciprocal_map_requires_positive_v():
    s = stationary_state(G, 0.5)
    with pytest.raises(NumericError):
        reciprocal_map(s)


def test_evolution_residual_needs_three_snapshots():
    s = smooth_state(G, 2, 0.05, 0.5, 10)
    tr = simulate(SimConfig(G, 0.01, 0.01), s)
    with pytest.raises(ValueError):
        transformed_evolution_residual(tr)


def test_biham_small_on_coarse_grid():
    s = smooth_state(Grid(128), 3, 0.05, 0.5, 12)
    r = biham_residual(s)
    assert r["J1_H1"] < 1e-8 and r["J2_H0"] < 1e-8
    assert r["J2_H0_unit_nonlocal"] > 1e-4


@pytest.mark.parametrize("H", ["H0", "H1"])
def test_gradient_consistent(H):
    s = smooth_state(G, 5, 0.05, 0.5, 10)
    u, w, v = random_fields(G, 99, 3, 0.1, 0.5, 6)
    d = {"u": u, "w": w, "v": v + 0.1}
    assert gateaux_check(s, H, d, 1e-3) < 1e-5


def test_csv_roundtrip(tmp_path):
    x = G.x
    p = write_fields_csv(tmp_path / "f.csv", "x", x, {"a": np.sin(x), "b": np.cos(x)})
    back = read_fields_csv(p)
    assert list(back) == ["x", "a", "b"]
    assert np.array_equal(back["a"], np.sin(x))
