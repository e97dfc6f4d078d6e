"""Uniform periodic grids, Fourier differentiation and the constant-symbol solves."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NumericError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid:
    N: int
    L: float = 2 * np.pi
    k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.N < 16 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 16, got {self.N}")
        if not self.L > 0:
            raise ValueError("period must be positive")
        object.__setattr__(self, "k", np.fft.rfftfreq(self.N, d=self.L / self.N) * 2 * np.pi)

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.N) * (self.L / self.N)

    @property
    def dx(self) -> float:
        return self.L / self.N

    def _ik(self, n: int) -> np.ndarray:
        s = (1j * self.k) ** n
        if n % 2 and self.N % 2 == 0:
            s = s.copy()
            s[-1] = 0.0  # Nyquist mode has no odd derivative on a real grid
        return s

    def diff(self, f: np.ndarray, n: int = 1) -> np.ndarray:
        if n == 0:
            return f
        return np.fft.irfft(np.fft.rfft(f) * self._ik(n), self.N)

    def apply_symbol(self, f: np.ndarray, symbol) -> np.ndarray:
        return np.fft.irfft(np.fft.rfft(f) * symbol(1j * self.k), self.N)

    def mean(self, f: np.ndarray) -> float:
        return float(np.mean(f))

    def integral(self, f: np.ndarray) -> float:
        return float(np.sum(f) * self.dx)

    def antiderivative(self, f: np.ndarray) -> np.ndarray:
        """Zero-mean periodic antiderivative; ``f`` must have zero mean."""
        fh = np.fft.rfft(f)
        out = np.zeros_like(fh)
        out[1:] = fh[1:] / (1j * self.k[1:])
        if self.N % 2 == 0:
            out[-1] = 0.0
        return np.fft.irfft(out, self.N)

    def dealias(self, f: np.ndarray) -> np.ndarray:
        fh = np.fft.rfft(f)
        fh[np.arange(fh.size) > self.N // 3] = 0.0
        return np.fft.irfft(fh, self.N)

    def interpolate(self, f: np.ndarray, pts: np.ndarray) -> np.ndarray:
        """Trigonometric interpolant of ``f`` (or of each row of ``f``) at arbitrary points."""
        f = np.asarray(f, dtype=float)
        fh = np.fft.rfft(f, axis=-1) / self.N
        w = np.full(fh.shape[-1], 2.0)
        w[0] = 1.0
        if self.N % 2 == 0:
            w[-1] = 1.0
        ph = np.exp(1j * np.outer(np.atleast_1d(pts), self.k))
        return ((w * fh) @ ph.T).real

    def diff_matrix(self) -> np.ndarray:
        """Dense first-derivative collocation matrix."""
        I = np.eye(self.N)
        return np.stack([self.diff(I[:, j]) for j in range(self.N)], axis=1)


# constant-coefficient symbols by name; the argument is ik
SYMBOLS = {
    "1-D2": lambda z: 1 - z ** 2,
    "D2-1": lambda z: z ** 2 - 1,
    "D2-4": lambda z: z ** 2 - 4,
    "D3-4D": lambda z: z ** 3 - 4 * z,
}


@dataclass
class SolveInfo:
    residual: float
    discarded_mean: float = 0.0


def helmholtz_solve(grid: Grid, f: np.ndarray, op: str, Q1: np.ndarray | None = None,
                    info: list | None = None, mean_tol: float = 1e-8,
                    project: bool = False) -> np.ndarray:
    """Invert one of ``1-D2, D2-1, D2-4, D3-4D`` or ``Dy-2Q1`` on the periodic grid.

    ``D3-4D`` annihilates constants: the input mean is projected out and recorded;
    a mean larger than ``mean_tol`` relative to the sup norm raises unless ``project``.
    """
    f = np.asarray(f, dtype=float)
    scale = max(np.max(np.abs(f)), 1e-300)
    if op == "Dy-2Q1":
        if Q1 is None:
            raise ValueError("Dy-2Q1 needs the Q1 field")
        A = grid.diff_matrix() - np.diag(2 * Q1)
        try:
            sol = np.linalg.solve(A, f)
        except np.linalg.LinAlgError as exc:
            raise NumericError("singular collocation matrix for Dy-2Q1") from exc
        res = np.max(np.abs(grid.diff(sol) - 2 * Q1 * sol - f))
        if not np.all(np.isfinite(sol)) or res > 1e-6 * scale:
            raise NumericError("ill-conditioned collocation matrix for Dy-2Q1")
        if info is not None:
            info.append(SolveInfo(res / scale))
        return sol
    if op not in SYMBOLS:
        raise ValueError(f"unknown operator {op!r}; expected one of {', '.join(SYMBOLS)} or Dy-2Q1")
    sym = SYMBOLS[op]
    fh = np.fft.rfft(f)
    s = sym(1j * grid.k)
    discarded = 0.0
    if op == "D3-4D":
        discarded = fh[0].real / grid.N
        if not project and abs(discarded) > mean_tol * scale:
            raise NumericError(f"D3-4D applied to input with mean {discarded:.3e}")
        fh[0] = 0.0
        s = s.copy()
        s[0] = 1.0
        if grid.N % 2 == 0:
            # odd symbol: the real Nyquist mode has no preimage, drop it
            fh[-1] = 0.0
    sol = np.fft.irfft(fh / s, grid.N)
    res = grid.apply_symbol(sol, sym)
    target = np.fft.irfft(fh, grid.N)
    if info is not None:
        info.append(SolveInfo(np.max(np.abs(res - target)) / scale, discarded))
    return sol
