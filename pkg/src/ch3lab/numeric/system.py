"""The three-component system on a periodic grid.

Fields are carried as velocity-type ``(p, q, r)`` together with the
momentum-type ``(u, v, w)`` they define.  Right sides, conserved densities and
Euler derivatives are the symbolic model expressions, sampled pointwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..models import CH3_DEFS, get_model
from ..symcore import JetSpace
from .evaluate import FieldEnv, evaluate
from .grid import Grid, NumericError, helmholtz_solve

ORDER = ("u", "w", "v")  # operator ordering of the Hamiltonian pair
# nonlinear part of 2v: 2v = q_xx - 4q + B(p, r)
B_TEXT = "p_xx*r_x - r_xx*p_x + 3*p_x*r - 3*p*r_x"


@lru_cache(maxsize=1)
def _symbolic():
    m = get_model("ch3")
    jet = m.jet
    z = JetSpace("x", ["p", "q", "r", "z"])
    Bz = z.parse("z*(" + B_TEXT + ")")
    out = {
        "defs": {k: jet.parse(v) for k, v in CH3_DEFS.items()},
        "evol": dict(m.evolution),
        "B": jet.parse(B_TEXT),
        "Bstar": {n: z.euler(Bz, n) for n in ("p", "r")},
        "H": {},
    }
    for name, F in m.functionals.items():
        out["H"][name] = {"density": F.density,
                          "euler": {n: jet.euler(F.density, n) for n in ("p", "q", "r")}}
    return out


@dataclass
class FieldState:
    grid: Grid
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    u: np.ndarray = field(default=None, repr=False)
    v: np.ndarray = field(default=None, repr=False)
    w: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        for n in ("p", "q", "r"):
            a = np.asarray(getattr(self, n), dtype=float)
            if a.shape != (self.grid.N,):
                raise ValueError(f"{n} has shape {a.shape}, expected ({self.grid.N},)")
            setattr(self, n, a)
        if self.u is None:
            env = FieldEnv(self.grid, {"p": self.p, "q": self.q, "r": self.r})
            d = _symbolic()["defs"]
            self.u, self.v, self.w = (evaluate(d[n], env) for n in ("u", "v", "w"))

    @classmethod
    def from_uvw(cls, grid: Grid, u, v, w) -> "FieldState":
        p = helmholtz_solve(grid, u, "1-D2")
        r = helmholtz_solve(grid, w, "D2-1")
        B = evaluate(_symbolic()["B"], FieldEnv(grid, {"p": p, "r": r}))
        q = helmholtz_solve(grid, 2 * np.asarray(v) - B, "D2-4")
        return cls(grid, p, q, r, np.asarray(u, float), np.asarray(v, float), np.asarray(w, float))

    def env(self) -> FieldEnv:
        return FieldEnv(self.grid, {n: getattr(self, n) for n in "pqruvw"})

    def v_margin(self) -> float:
        return float(np.min(self.v))

    def check(self) -> None:
        if not np.all(np.isfinite(self.v)):
            raise NumericError("non-finite field values")
        if self.v_margin() <= 0:
            raise NumericError(f"v is not positive (min {self.v_margin():.3e})")


def stationary_state(grid: Grid, q0: float = -0.5) -> FieldState:
    z = np.zeros(grid.N)
    return FieldState(grid, z, np.full(grid.N, q0), z.copy())


def random_fields(grid: Grid, seed: int, count: int = 3, amplitude: float = 0.05,
                  decay: float = 0.5, kmax: int = 12) -> list:
    """Random trigonometric polynomials with coefficients damped by ``exp(-decay |k|)``.

    Each is rescaled so that it and its first two derivatives stay below
    ``amplitude``.  The same seed gives the same functions on every grid that
    resolves ``kmax``.
    """
    if 2 * kmax >= grid.N:
        raise ValueError(f"kmax = {kmax} is not resolved on N = {grid.N}")
    rng = np.random.default_rng(seed)
    theta = 2 * np.pi * grid.x / grid.L
    ks = np.arange(1, kmax + 1)
    scale = 2 * np.pi / grid.L
    c, s = np.cos(np.outer(theta, ks)), np.sin(np.outer(theta, ks))
    out = []
    for _ in range(count):
        a, b = rng.normal(size=(2, kmax))
        env = np.exp(-decay * ks)
        f = c @ (a * env) + s @ (b * env)
        bound = max(np.sum((np.abs(a) + np.abs(b)) * env * (ks * scale) ** n) for n in range(3))
        out.append(amplitude * f / bound)
    return out


def smooth_state(grid: Grid, seed: int = 0, amplitude: float = 0.05, decay: float = 0.5,
                 kmax: int = 12, q0: float = -0.5) -> FieldState:
    """Random smooth ``(p, q0 + q, r)``; ``v`` stays near ``-2 q0``."""
    p, q, r = random_fields(grid, seed, 3, amplitude, decay, kmax)
    st = FieldState(grid, p, q + q0, r)
    st.check()
    return st


def mode_state(grid: Grid, eps: float = 0.05, q0: float = -0.5, k: int = 1) -> FieldState:
    """Single Fourier modes: the reference initial family."""
    x = 2 * np.pi * grid.x / grid.L
    st = FieldState(grid, eps * np.cos(k * x), q0 + eps * np.sin(k * x), eps * np.sin(2 * k * x))
    st.check()
    return st


def rhs_eval(state: FieldState, dealias: bool = False) -> dict:
    """``{u_t, v_t, w_t}`` from the model right sides."""
    env = state.env()
    ev = _symbolic()["evol"]
    out = {n: evaluate(ev[n], env) for n in ("u", "v", "w")}
    if dealias:
        out = {n: state.grid.dealias(f) for n, f in out.items()}
    return out


def velocity_rates(state: FieldState, rates: dict) -> dict:
    """``(p, q, r)_t`` from ``(u, v, w)_t`` through the Helmholtz definitions."""
    g = state.grid
    pt = helmholtz_solve(g, rates["u"], "1-D2")
    rt = helmholtz_solve(g, rates["w"], "D2-1")
    # linearization of B along (pt, rt): d/de B(p + e pt, r + e rt)
    env = FieldEnv(g, {"p": state.p, "r": state.r, "P": pt, "R": rt})
    Bt = (env.get("P", 2) * env.get("r", 1) + env.get("p", 2) * env.get("R", 1)
          - env.get("R", 2) * env.get("p", 1) - env.get("r", 2) * env.get("P", 1)
          + 3 * (env.get("P", 1) * state.r + env.get("p", 1) * rt)
          - 3 * (pt * env.get("r", 1) + state.p * env.get("R", 1)))
    qt = helmholtz_solve(g, 2 * rates["v"] - Bt, "D2-4")
    return {"p": pt, "q": qt, "r": rt}


def conserved_quantities(state: FieldState) -> dict:
    env = state.env()
    H = _symbolic()["H"]
    g = state.grid
    out = {n: g.integral(evaluate(H[n]["density"], env)) for n in sorted(H)}
    if np.any(state.v <= 0):
        raise NumericError("Iv needs v > 0")
    out["Iv"] = g.integral(np.sqrt(state.v))
    return out


def functional_gradient(state: FieldState, functional: str) -> dict:
    """Variational derivatives with respect to ``(u, w, v)``.

    With ``Z = (D2-4)^-1 E_q``:  dH/dv = 2Z,
    dH/du = (1-D2)^-1 (E_p - B_p* Z),  dH/dw = (D2-1)^-1 (E_r - B_r* Z).
    """
    sym = _symbolic()
    if functional not in sym["H"]:
        raise KeyError(f"unknown functional {functional!r}; expected one of {sorted(sym['H'])}")
    g = state.grid
    env = state.env()
    E = {n: evaluate(e, env) for n, e in sym["H"][functional]["euler"].items()}
    Z = helmholtz_solve(g, E["q"], "D2-4")
    zenv = FieldEnv(g, {"p": state.p, "q": state.q, "r": state.r, "z": Z})
    Bp = evaluate(sym["Bstar"]["p"], zenv)
    Br = evaluate(sym["Bstar"]["r"], zenv)
    return {
        "u": helmholtz_solve(g, E["p"] - Bp, "1-D2"),
        "w": helmholtz_solve(g, E["r"] - Br, "D2-1"),
        "v": 2 * Z,
    }


def apply_J1(state: FieldState, X: dict, sign: float = 1.0) -> dict:
    g = state.grid
    A = lambda f: g.diff(f, 2) - f
    v = state.v
    return {
        "u": sign * A(X["w"]),
        "w": -sign * A(X["u"]),
        "v": -sign * (g.diff(v * X["v"]) + v * g.diff(X["v"])),
    }


def apply_J2(state: FieldState, X: dict, diagnostics: dict | None = None,
             nonlocal_scale: float = 2.0) -> dict:
    """``M X - c N (D3-4D)^-1 N* X`` with zero-mean inverses.

    ``c = 2`` is the normalization under which ``J2 grad H0`` is the flow.  The
    mean discarded before each inverse is recorded in ``diagnostics``.
    """
    g = state.grid
    u, v, w = state.u, state.v, state.w
    Xu, Xw, Xv = X["u"], X["w"], X["v"]
    phi_in = u * Xu - w * Xw
    Phi = g.antiderivative(phi_in - phi_in.mean())
    ux, wx, vx = g.diff(u), g.diff(w), g.diff(v)
    NsX = (-1.5 * g.diff(u * Xu) + ux * Xu
           - 1.5 * g.diff(w * Xw) + wx * Xw
           - g.diff(v * Xv) - v * g.diff(Xv))
    info: list = []
    Psi = nonlocal_scale * helmholtz_solve(g, NsX, "D3-4D", info=info, project=True)
    Psix = g.diff(Psi)
    if diagnostics is not None:
        scale = max(np.max(np.abs(NsX)), 1e-300)
        diagnostics["discarded_mean_D3-4D"] = abs(info[0].discarded_mean) / scale
        diagnostics["discarded_mean_D"] = abs(phi_in.mean()) / max(np.max(np.abs(phi_in)), 1e-300)
    return {
        "u": 1.5 * u * Phi - v * Xw - (1.5 * u * Psix + ux * Psi),
        "w": v * Xu - 1.5 * w * Phi - (1.5 * w * Psix + wx * Psi),
        "v": -(2 * v * Psix + vx * Psi),
    }


def kernel_directions(state: FieldState) -> list:
    """Images of the constants left free by the two periodic inverses in ``J2``."""
    g = state.grid
    u, v, w = state.u, state.v, state.w
    return [{"u": 1.5 * u, "w": -1.5 * w, "v": np.zeros_like(v)},
            {"u": g.diff(u), "w": g.diff(w), "v": g.diff(v)}]


def _stack(F: dict) -> np.ndarray:
    return np.concatenate([F[n] for n in ORDER])


def _rel(a: np.ndarray, scale: float) -> float:
    return float(np.max(np.abs(a)) / scale) if scale > 0 else float(np.max(np.abs(a)))


def biham_residual(state: FieldState, flip_J1: bool = False) -> dict:
    """Relative sup norms of ``rhs - J1 grad H1`` and ``rhs - J2 grad H0``.

    The second is taken modulo the two kernel directions; the fitted constants
    and the residual of the unnormalized operator are reported alongside.
    """
    rhs = _stack(rhs_eval(state))
    diag: dict = {}
    a = _stack(apply_J1(state, functional_gradient(state, "H1"), -1.0 if flip_J1 else 1.0))
    X0 = functional_gradient(state, "H0")
    b = _stack(apply_J2(state, X0, diag))
    scale = float(np.max(np.abs(rhs)))
    K = np.column_stack([_stack(k) for k in kernel_directions(state)])
    R = rhs - b
    c = np.linalg.lstsq(K, R, rcond=None)[0] if np.any(K) else np.zeros(2)
    R = R - K @ c
    b1 = _stack(apply_J2(state, X0, nonlocal_scale=1.0))
    R1 = rhs - b1
    c1 = np.linalg.lstsq(K, R1, rcond=None)[0] if np.any(K) else np.zeros(2)
    return {
        "J1_H1": _rel(rhs - a, scale),
        "J2_H0": _rel(R, scale),
        "kernel_constants": [float(x) for x in c],
        "J2_H0_unit_nonlocal": _rel(R1 - K @ c1, scale),
        **{k: float(x) for k, x in diag.items()},
    }


def gateaux_check(state: FieldState, functional: str, direction: dict, eps: float) -> float:
    """``|central difference - <gradient, direction>|`` relative to the pairing."""
    g = state.grid

    def H(e):
        st = FieldState.from_uvw(g, state.u + e * direction["u"], state.v + e * direction["v"],
                                 state.w + e * direction["w"])
        return conserved_quantities(st)[functional]

    fd = (H(eps) - H(-eps)) / (2 * eps)
    grad = functional_gradient(state, functional)
    pair = sum(g.integral(grad[n] * direction[n]) for n in ORDER)
    return abs(fd - pair) / max(abs(pair), 1e-300)


@dataclass
class SimConfig:
    grid: Grid
    dt: float
    T: float
    dealias: bool = True
    monitor_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.T < self.dt:
            raise ValueError("T must be at least dt")
        if self.monitor_every < 1:
            raise ValueError("monitor cadence must be a positive step count")

    @property
    def steps(self) -> int:
        n = round(self.T / self.dt)
        if abs(n * self.dt - self.T) > 1e-9 * self.T:
            raise ValueError("T must be an integer multiple of dt")
        return n


@dataclass
class Snapshot:
    t: float
    state: FieldState
    Y0: float  # y coordinate of the node x = 0


@dataclass
class Trajectory:
    config: SimConfig
    snapshots: list
    diagnostics: dict


def _stage(grid: Grid, U: tuple, dealias: bool):
    u, v, w, _ = U
    st = FieldState.from_uvw(grid, u, v, w)
    st.check()
    R = rhs_eval(st, dealias)
    y0dot = float(np.sqrt(st.v[0]) * st.q[0])
    return np.stack([R["u"], R["v"], R["w"]]), y0dot, st


def simulate(config: SimConfig, initial: FieldState, Y0: float = 0.0) -> Trajectory:
    """Classical RK4 in ``(u, v, w)`` with the y-origin carried along."""
    g = config.grid
    initial.check()
    U = np.stack([initial.u, initial.v, initial.w])
    if config.dealias:
        U = np.stack([g.dealias(f) for f in U])
    y0 = Y0
    dt = config.dt
    st0 = FieldState.from_uvw(g, *U)
    snaps = [Snapshot(0.0, st0, y0)]
    c0 = conserved_quantities(st0)
    margin = st0.v_margin()
    for n in range(1, config.steps + 1):
        t = (n - 1) * dt
        try:
            k1, l1, _ = _stage(g, (*U, y0), config.dealias)
            k2, l2, _ = _stage(g, (*(U + 0.5 * dt * k1), 0), config.dealias)
            k3, l3, _ = _stage(g, (*(U + 0.5 * dt * k2), 0), config.dealias)
            k4, l4, _ = _stage(g, (*(U + dt * k3), 0), config.dealias)
        except NumericError as exc:
            raise NumericError(f"t = {t:.6g}: {exc}") from exc
        U = U + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        y0 = y0 + dt / 6 * (l1 + 2 * l2 + 2 * l3 + l4)
        if not np.all(np.isfinite(U)):
            raise NumericError(f"t = {n * dt:.6g}: non-finite values")
        if n % config.monitor_every == 0 or n == config.steps:
            st = FieldState.from_uvw(g, *U)
            try:
                st.check()
            except NumericError as exc:
                raise NumericError(f"t = {n * dt:.6g}: {exc}") from exc
            margin = min(margin, st.v_margin())
            snaps.append(Snapshot(n * dt, st, y0))
    c1 = conserved_quantities(snaps[-1].state)
    drift = {k: abs(c1[k] - c0[k]) / max(abs(c0[k]), 1e-300) for k in c0}
    return Trajectory(config, snaps, {"initial": c0, "final": c1, "drift": drift,
                                      "v_margin": margin})
