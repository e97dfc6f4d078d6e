"""Numerical reciprocal map and the transformed system on sampled fields.

The new coordinate is ``y = Y0 + int_0^x v^(1/2)``; its period is ``Iv``.
Fields are resampled on a uniform y-grid by trigonometric interpolation at the
preimages of the grid nodes, found by Newton iteration on the monotone map.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..models import MK_F, get_model
from .evaluate import FieldEnv, evaluate
from .grid import Grid, NumericError, helmholtz_solve
from .system import FieldState, Trajectory

TRANSFORMED = ("Q1", "Q2", "Q3", "a", "b", "c", "g", "f", "k")


@lru_cache(maxsize=1)
def _symbolic():
    m = get_model("mkdv3")
    jet = m.jet
    return {
        "F": {n: jet.parse(t) for n, t in MK_F.items()},
        "evol": dict(m.evolution),
        "gen": {n: jet.gens[n].rule for n in ("g", "f", "k")},
        "a": jet.parse("a"),
    }


@dataclass
class TransformedSnapshot:
    grid: Grid  # uniform y-grid, period Iv
    fields: dict
    Y0: float
    x_nodes: np.ndarray  # preimages of the y-grid nodes
    diagnostics: dict = field(default_factory=dict)

    def env(self) -> FieldEnv:
        return FieldEnv(self.grid, self.fields)


class YMap:
    """``y(x) = Y0 + m x + P(x)`` with ``P`` periodic, and its inverse."""

    def __init__(self, state: FieldState, Y0: float = 0.0):
        g = state.grid
        if np.any(state.v <= 0):
            raise NumericError("reciprocal map needs v > 0")
        self.grid = g
        self.sq = np.sqrt(state.v)
        self.m = float(self.sq.mean())
        P = g.antiderivative(self.sq - self.m)
        self.P = P - P[0]
        self.Y0 = Y0
        self.period = self.m * g.L

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.Y0 + self.m * x + self.grid.interpolate(self.P, x) - self.grid.interpolate(
            self.P, np.zeros(1))[0]

    def inverse(self, y: np.ndarray, tol: float = 1e-14, maxit: int = 50) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        x = (y - self.Y0) / self.m
        for _ in range(maxit):
            F = self(x) - y
            dF = self.grid.interpolate(self.sq, x)
            if np.any(dF <= 0):
                raise NumericError("y-map is not monotone")
            step = F / dF
            x = x - step
            if np.max(np.abs(step)) <= tol * max(1.0, self.grid.L):
                break
        return x


def reciprocal_map(state: FieldState, Y0: float = 0.0, period: float | None = None
                   ) -> TransformedSnapshot:
    """Transformed fields ``Q1, Q2, Q3, a, b, c, g, f, k`` on a uniform y-grid.

    ``g`` comes from the periodic solve of ``g_y = 2 Q1 g - 2``.  ``f`` and ``k``
    are the pulled-back ``p_x r_x - p r`` and ``p r_x - p_x r``; the means of
    their y-integrands and the offsets of the zero-mean antiderivatives are
    reported as diagnostics.
    """
    gx = state.grid
    ym = YMap(state, Y0)
    Y = period if period is not None else ym.period
    gy = Grid(gx.N, Y)
    nodes = ym.inverse(gy.x)
    s_x = state.v ** 0.25
    px, rx = gx.diff(state.p), gx.diff(state.r)
    samples = {
        "s": s_x, "p": state.p, "q": state.q, "r": state.r, "u": state.u, "w": state.w,
        "fx": px * rx - state.p * state.r, "kx": state.p * rx - px * state.r,
    }
    names = list(samples)
    S = dict(zip(names, gx.interpolate(np.stack([samples[n] for n in names]), nodes)))
    env = FieldEnv(gy, {"s": S["s"], "q": S["q"]})
    s, s_y, q_y = S["s"], env.get("s", 1), env.get("q", 1)
    out = {
        "Q1": s_y / s + s ** -2,
        "Q2": S["u"] * s ** -3,
        "Q3": S["w"] * s ** -3,
        "a": S["p"] * s,
        "b": S["r"] * s,
        "c": q_y - 2 * S["q"] * s ** -2,
        "f": S["fx"],
        "k": S["kx"],
    }
    out["g"] = helmholtz_solve(gy, np.full(gy.N, -2.0), "Dy-2Q1", Q1=out["Q1"])
    diag = {"g_minus_s2": float(np.max(np.abs(out["g"] - s ** 2)))}
    ev = FieldEnv(gy, out)
    sym = _symbolic()
    for n in ("f", "k"):
        integrand = evaluate(sym["gen"][n], ev)
        diag[f"{n}_integrand_mean"] = float(integrand.mean())
        zm = gy.antiderivative(integrand - integrand.mean())
        diag[f"{n}_offset"] = float(np.mean(out[n] - zm))
        diag[f"{n}_rule_residual"] = float(np.max(np.abs(gy.diff(out[n]) - integrand)))
    return TransformedSnapshot(gy, out, Y0, nodes, diag)


def f_norms(snap: TransformedSnapshot) -> dict:
    env = snap.env()
    return {n: float(np.max(np.abs(evaluate(E, env)))) for n, E in _symbolic()["F"].items()}


def transformed_rhs(snap: TransformedSnapshot, omit_a: bool = False) -> dict:
    env = snap.env()
    sym = _symbolic()
    out = {n: evaluate(E, env) for n, E in sym["evol"].items()}
    if omit_a:
        out["Q2"] = out["Q2"] + snap.fields["a"]
    return out


def transformed_evolution_residual(traj: Trajectory, centers: int = 8, omit_a: bool = False,
                                   y_shift: float = 0.0) -> dict:
    """Centered tau-differences of ``Q1, Q2, Q3`` at fixed y against the right sides.

    Evaluated at ``centers`` interior snapshots spread over the run; norms are
    relative to the sup of the right side (absolute when that vanishes).
    """
    snaps = traj.snapshots
    if len(snaps) < 3:
        raise ValueError("need at least three snapshots")
    dts = np.diff([s.t for s in snaps])
    if np.max(np.abs(dts - dts[0])) > 1e-12 * max(1.0, abs(dts[0])):
        raise ValueError("snapshots must be uniformly spaced in time")
    h = float(dts[0])
    n_int = len(snaps) - 2
    idx = sorted({1 + int(round(i * (n_int - 1) / max(centers - 1, 1))) for i in range(centers)})
    Y = YMap(snaps[0].state).period
    worst = {n: 0.0 for n in ("Q1", "Q2", "Q3")}
    fn = {n: 0.0 for n in ("F1", "F2", "F3")}
    diag: dict = {"f_integrand_mean": 0.0, "k_integrand_mean": 0.0, "g_minus_s2": 0.0}
    for i in idx:
        tri = [reciprocal_map(snaps[j].state, snaps[j].Y0 + y_shift, Y) for j in (i - 1, i, i + 1)]
        rhs = transformed_rhs(tri[1], omit_a)
        for n in worst:
            fd = (tri[2].fields[n] - tri[0].fields[n]) / (2 * h)
            scale = float(np.max(np.abs(rhs[n])))
            err = float(np.max(np.abs(fd - rhs[n])))
            worst[n] = max(worst[n], err / scale if scale > 1e-12 else err)
        for n, x in f_norms(tri[1]).items():
            fn[n] = max(fn[n], x)
        for k in diag:
            diag[k] = max(diag[k], abs(tri[1].diagnostics[k]))
    return {"evolution": worst, "F": fn, "spacing": h, "centers": idx, **diag}
