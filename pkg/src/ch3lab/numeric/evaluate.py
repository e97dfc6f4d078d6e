"""Pointwise evaluation of jet polynomials on sampled periodic fields."""
from __future__ import annotations

import numpy as np

from ..symcore import Expr
from ..symcore.expr import GEN, ODD, PARAM
from .grid import Grid


class FieldEnv:
    """Base arrays plus cached spectral derivatives, keyed by ``(name, order)``."""

    def __init__(self, grid: Grid, fields: dict, params: dict | None = None):
        self.grid = grid
        self._cache = {(n, 0): np.asarray(f, dtype=float) for n, f in fields.items()}
        self.params = dict(params or {})

    def __contains__(self, name: str) -> bool:
        return (name, 0) in self._cache

    def get(self, name: str, order: int = 0) -> np.ndarray:
        key = (name, order)
        hit = self._cache.get(key)
        if hit is None:
            base = self._cache.get((name, 0))
            if base is None:
                raise KeyError(f"no samples for {name!r}")
            hit = self.grid.diff(base, order)
            self._cache[key] = hit
        return hit

    def __getitem__(self, name: str) -> np.ndarray:
        return self.get(name)


def evaluate(E: Expr, env: FieldEnv) -> np.ndarray:
    out = np.zeros(env.grid.N)
    for m, c in E.terms.items():
        term = np.full(env.grid.N, float(c))
        for a, e in m:
            if a.kind >= ODD:
                raise ValueError(f"odd atom {a} cannot be sampled")
            if a.kind == PARAM:
                if a.name not in env.params:
                    raise KeyError(f"no value for parameter {a.name!r}")
                term = term * env.params[a.name] ** e
                continue
            if a.kind == GEN and (a.name, 0) not in env._cache:
                raise KeyError(f"no samples for generator {a.name!r}")
            f = env.get(a.name, a.order)
            term = term * (f ** e if e != 1 else f)
        out += term
    return out
