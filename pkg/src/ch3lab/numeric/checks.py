"""Numeric certifications packaged as check reports.

Every residual is accompanied by a refined run; a residual that fails to
decrease marks the check failed whatever its size.
"""
from __future__ import annotations

import copy
import math
import time
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from ..report import CheckReport
from .grid import Grid
from .system import (SimConfig, biham_residual, gateaux_check, random_fields, simulate,
                     smooth_state)
from .transform import transformed_evolution_residual


@dataclass(frozen=True)
class NumericConfig:
    N: int = 256
    dt: float = 1e-3
    T: float = 0.5
    seed: int = 3
    amplitude: float = 0.3
    decay: float = 0.15
    kmax: int = 40  # simulated data
    biham_kmax: int = 127  # broadband data for the operator identities
    centers: int = 8
    tol_biham: float = 1e-6
    tol_transform: float = 1e-4
    tol_drift: float = 1e-8
    order_N: int = 64
    order_dt: float = 0.05
    order_T: float = 0.5
    order_kmax: int = 10
    order_decay: float = 0.3

    def as_dict(self) -> dict:
        return asdict(self)


def fmt(x: float) -> str:
    return f"{x:.3e}"


def _table(rows: dict) -> str:
    return "; ".join(f"{k}={fmt(v)}" for k, v in rows.items())


def _rep(id_, ok, residual, anchor, t0, details) -> CheckReport:
    return CheckReport(id_, "ch3", "pass" if ok else "fail", residual, anchor,
                       time.perf_counter() - t0, details)


def check_biham(cfg: NumericConfig = NumericConfig()) -> CheckReport:
    t0 = time.perf_counter()
    res = {}
    for N in (cfg.N, 2 * cfg.N):
        st = smooth_state(Grid(N), cfg.seed, cfg.amplitude, cfg.decay,
                          min(cfg.biham_kmax, cfg.N // 2 - 1))
        res[N] = biham_residual(st)
    a, b = res[cfg.N], res[2 * cfg.N]
    keys = ("J1_H1", "J2_H0")
    small = all(a[k] <= cfg.tol_biham for k in keys)
    dec = all(b[k] < a[k] for k in keys)
    means = max(a["discarded_mean_D3-4D"], a["discarded_mean_D"])
    ok = small and dec and means <= 1e-8
    details = {f"N={N}": _table({k: res[N][k] for k in keys}) for N in res}
    details["kernel constants"] = ", ".join(fmt(c) for c in a["kernel_constants"])
    details["discarded means"] = fmt(means)
    details["unit nonlocal factor"] = fmt(a["J2_H0_unit_nonlocal"])
    details["decreasing"] = "yes" if dec else "no"
    return _rep("numeric.biham", ok, _table({k: a[k] for k in keys}),
                "bi-Hamiltonian form, J1 grad H1 and J2 grad H0 against the flow", t0, details)


def _direction(grid: Grid, seed: int) -> dict:
    u, w, v = random_fields(grid, seed + 1000, 3, 0.1, 0.3, 8)
    # a constant part in v keeps the pairing with grad H0 of order one
    return {"u": u, "w": w, "v": v + 0.1}


def check_gradients(cfg: NumericConfig = NumericConfig(),
                    eps=(0.1, 0.05, 0.025, 0.0125)) -> CheckReport:
    """Central Gateaux differences against the gradient pairing.

    H1 is quartic in the fields so the error is second order in eps; H0 is
    quadratic and the central difference is exact up to round-off.
    """
    t0 = time.perf_counter()
    g = Grid(cfg.N)
    st = smooth_state(g, cfg.seed, cfg.amplitude, cfg.decay, cfg.kmax)
    d = _direction(g, cfg.seed)
    err = {H: [gateaux_check(st, H, d, e) for e in eps] for H in ("H0", "H1")}
    orders = [math.log2(err["H1"][i] / err["H1"][i + 1]) for i in range(len(eps) - 1)]
    ok = min(orders) >= 1.9 and max(err["H0"]) <= 1e-10
    details = {H: ", ".join(fmt(e) for e in err[H]) for H in err}
    details["H1 orders"] = ", ".join(f"{o:.3f}" for o in orders)
    return _rep("numeric.gradients", ok, f"min order {min(orders):.3f}; H0 max {fmt(max(err['H0']))}",
                "variational derivatives of H0 and H1", t0, details)


@dataclass
class TransformRun:
    N: int
    dt: float
    drift: dict
    residual: dict
    v_margin: float


def _transform_run(cfg: NumericConfig, N: int, dt: float, y_shift: float = 0.0) -> TransformRun:
    g = Grid(N)
    st = smooth_state(g, cfg.seed, cfg.amplitude, cfg.decay, cfg.kmax)
    tr = simulate(SimConfig(g, dt, cfg.T), st)
    r = transformed_evolution_residual(tr, cfg.centers, y_shift=y_shift)
    return TransformRun(N, dt, tr.diagnostics["drift"], r, tr.diagnostics["v_margin"])


def transform_runs(cfg: NumericConfig = NumericConfig()) -> dict:
    return {"base": _transform_run(cfg, cfg.N, cfg.dt),
            "refined": _transform_run(cfg, 2 * cfg.N, cfg.dt / 2)}


def _flat(r: TransformRun) -> dict:
    out = {f"d{k}/dtau": v for k, v in r.residual["evolution"].items()}
    out.update(r.residual["F"])
    return out


def check_transform(runs: dict, cfg: NumericConfig = NumericConfig()) -> list[CheckReport]:
    t0 = time.perf_counter()
    base, ref = runs["base"], runs["refined"]
    a, b = _flat(base), _flat(ref)
    reports = []
    for name, keys, anchor in (
        ("numeric.transform.constraints", ("F1", "F2", "F3"),
         "F1 = F2 = F3 = 0 on the transformed fields"),
        ("numeric.transform.evolution", ("dQ1/dtau", "dQ2/dtau", "dQ3/dtau"),
         "transformed system, centered tau differences at fixed y"),
    ):
        small = all(a[k] <= cfg.tol_transform for k in keys)
        dec = all(b[k] < a[k] for k in keys)
        details = {
            f"N={base.N} dt={base.dt:g}": _table({k: a[k] for k in keys}),
            f"N={ref.N} dt={ref.dt:g}": _table({k: b[k] for k in keys}),
            "decreasing": "yes" if dec else "no",
        }
        if name.endswith("constraints"):
            details["f integrand mean"] = fmt(base.residual["f_integrand_mean"])
            details["k integrand mean"] = fmt(base.residual["k_integrand_mean"])
            details["g - s^2"] = fmt(base.residual["g_minus_s2"])
        reports.append(_rep(name, small and dec, _table({k: a[k] for k in keys}), anchor, t0,
                            details))
    drift = base.drift
    ok = all(v <= cfg.tol_drift for v in drift.values())
    reports.append(_rep("numeric.drift", ok, _table(drift), "conservation of H0, H1 and Iv", t0,
                        {"v margin": fmt(base.v_margin)}))
    return reports


def check_y_translation(cfg: NumericConfig = NumericConfig(), shift: float = 0.7) -> CheckReport:
    """The transformed residuals do not depend on the choice of y origin."""
    t0 = time.perf_counter()
    small = NumericConfig(**{**cfg.as_dict(), "N": 128, "T": 0.05, "centers": 3,
                             "kmax": cfg.order_kmax, "decay": cfg.order_decay})
    a = _flat(_transform_run(small, 128, cfg.dt))
    b = _flat(_transform_run(small, 128, cfg.dt, y_shift=shift))
    ev = [k for k in a if k.startswith("dQ")]
    diff = max(abs(a[k] - b[k]) / max(a[k], 1e-300) for k in ev)
    # F norms sit at round-off here; only their size is compared
    fs = max(max(a[k], b[k]) for k in a if k.startswith("F"))
    return _rep("numeric.y-translation", diff <= 2e-2 and fs <= 1e-6, fmt(diff),
                "invariance of the transformed residuals under y translation", t0,
                {"unshifted": _table(a), "shifted": _table(b), "max F": fmt(fs)})


def self_convergence(cfg: NumericConfig = NumericConfig()) -> dict:
    g = Grid(cfg.order_N)
    st = smooth_state(g, cfg.seed, cfg.amplitude, cfg.order_decay, cfg.order_kmax)
    finals = []
    drifts = []
    for dt in (cfg.order_dt, cfg.order_dt / 2, cfg.order_dt / 4):
        tr = simulate(SimConfig(g, dt, cfg.order_T), st)
        s = tr.snapshots[-1].state
        finals.append(np.concatenate([s.u, s.v, s.w]))
        drifts.append(max(tr.diagnostics["drift"].values()))
    e1 = float(np.max(np.abs(finals[0] - finals[1])))
    e2 = float(np.max(np.abs(finals[1] - finals[2])))
    return {"errors": [e1, e2], "order": math.log2(e1 / e2), "drifts": drifts}


def check_order(cfg: NumericConfig = NumericConfig()) -> CheckReport:
    t0 = time.perf_counter()
    r = self_convergence(cfg)
    ok = abs(r["order"] - 4) <= 0.3
    return _rep("numeric.order", ok, f"order {r['order']:.3f}",
                "self-convergence of the fourth-order time stepping", t0,
                {"successive differences": ", ".join(fmt(e) for e in r["errors"]),
                 "drift per dt": ", ".join(fmt(d) for d in r["drifts"])})


@lru_cache(maxsize=4)
def _cached_transform(cfg: NumericConfig) -> tuple:
    return tuple(check_transform(transform_runs(cfg), cfg))


NUMERIC_CHECKS = ("biham", "gradients", "order", "y-translation", "transform.constraints",
                  "transform.evolution", "drift")


def run_numeric(name: str, cfg: NumericConfig = NumericConfig()) -> CheckReport:
    """One named numeric certification; the transform family shares its two runs."""
    if name == "biham":
        return check_biham(cfg)
    if name == "gradients":
        return check_gradients(cfg)
    if name == "order":
        return check_order(cfg)
    if name == "y-translation":
        return check_y_translation(cfg)
    if name in ("transform.constraints", "transform.evolution", "drift"):
        for r in _cached_transform(cfg):
            if r.id == "numeric." + name:
                return copy.deepcopy(r)
    raise ValueError(f"unknown numeric check {name!r}; expected one of {', '.join(NUMERIC_CHECKS)}")


def numeric_suite(cfg: NumericConfig = NumericConfig()) -> list[CheckReport]:
    return sorted((run_numeric(n, cfg) for n in NUMERIC_CHECKS), key=lambda r: r.id)


__all__ = [
    "NUMERIC_CHECKS", "NumericConfig", "run_numeric", "check_biham", "check_gradients", "check_order", "check_transform",
    "check_y_translation", "numeric_suite", "self_convergence", "transform_runs",
]
