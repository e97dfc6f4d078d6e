"""Matrix integro-differential operators on a jet space.

A :class:`LinOp` is ``sum_k c_k d^k + sum m * Inv(P) * d^rho * n`` where the
``c_k`` are coefficient expressions, ``P`` is a monic constant-coefficient
polynomial in ``d`` and ``m``, ``n`` are monomials with ``rho < deg P``.  Every
operator built from compositions and adjoints reduces to this canonical form,
so equality and skewness are termwise comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .report import CheckReport
from .symcore import Expr, JetSpace, as_expr, diff_atom
from .symcore.expr import ONE_MONO, PARAM, VAR, mono_mul
from .symcore.integrate import UnresolvedNonlocal, integrate

Poly = tuple  # monic constant coefficients (p_0, ..., p_n), p_n == 1


def _monic(coeffs: Sequence) -> tuple[Fraction, Poly]:
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ZeroDivisionError("Inv of the zero operator")
    lead = cs[-1]
    return lead, tuple(c / lead for c in cs)


def _divmod_dn(n: int, P: Poly) -> tuple[list, list]:
    """Quotient and remainder of d^n by P."""
    deg = len(P) - 1
    rem = [Fraction(0)] * (n + 1)
    rem[n] = Fraction(1)
    quo = [Fraction(0)] * max(n - deg + 1, 1)
    for k in range(n, deg - 1, -1):
        c = rem[k]
        if c:
            quo[k - deg] = c
            for i, p in enumerate(P):
                rem[k - deg + i] -= c * p
    return quo, rem[:deg]


def _poly_text(P: Poly, var: str) -> str:
    parts = []
    for k in range(len(P) - 1, -1, -1):
        c = P[k]
        if not c:
            continue
        d = "" if k == 0 else (f"D{var}" if k == 1 else f"D{var}^{k}")
        mag = abs(c)
        coef = "" if (mag == 1 and d) else (str(mag) if mag.denominator == 1 else f"{mag}")
        body = "*".join(x for x in (coef, d) if x)
        parts.append(("-" if c < 0 else "+") + body)
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


class LinOp:
    """Scalar integro-differential operator in canonical form."""

    __slots__ = ("jet", "local", "nonlocal_")

    def __init__(self, jet: JetSpace, local: dict | None = None, nonlocal_: dict | None = None):
        self.jet = jet
        self.local = {k: v for k, v in (local or {}).items() if v.terms}
        self.nonlocal_ = {P: t for P, t in (nonlocal_ or {}).items() if t}

    # constructors
    @classmethod
    def zero(cls, jet):
        return cls(jet)

    @classmethod
    def mul(cls, jet, c) -> "LinOp":
        c = jet.parse(c) if isinstance(c, str) else as_expr(c)
        return cls(jet, {0: c})

    @classmethod
    def d(cls, jet, k: int = 1) -> "LinOp":
        return cls(jet, {k: Expr.const(1)})

    @classmethod
    def poly(cls, jet, coeffs: Sequence) -> "LinOp":
        return cls(jet, {k: Expr.const(c) for k, c in enumerate(coeffs) if c})

    @classmethod
    def inv(cls, jet, coeffs: Sequence) -> "LinOp":
        """Formal inverse of the constant-coefficient operator ``sum coeffs[k] d^k``."""
        lead, P = _monic(coeffs)
        out = cls(jet)
        out._add_sandwich(Expr.const(1 / lead), P, 0, Expr.const(1))
        return out

    # internal builders
    def _add_local(self, k: int, c: Expr) -> None:
        if not c.terms:
            return
        v = self.local.get(k)
        v = c if v is None else v + c
        if v.terms:
            self.local[k] = v
        else:
            self.local.pop(k, None)

    def _add_sandwich(self, a: Expr, P: Poly, n: int, b: Expr, scale=Fraction(1)) -> None:
        """Add ``scale * a Inv(P) d^n b`` after reducing d^n modulo P."""
        quo, rem = _divmod_dn(n, P)
        if any(quo):
            loc = LinOp(self.jet, {k: a * q * scale for k, q in enumerate(quo) if q})
            self.iadd(loc.compose(LinOp.mul(self.jet, b)))
        table = self.nonlocal_.setdefault(P, {})
        for rho, r in enumerate(rem):
            if not r:
                continue
            for ma, ca in a.terms.items():
                for mb, cb in b.terms.items():
                    key = (ma, rho, mb)
                    if any(x.kind == PARAM for x, _ in mb):
                        # constants commute with Inv(P); keep them on the left
                        sgn, ma2 = mono_mul(ma, tuple(t for t in mb if t[0].kind == PARAM))
                        key = (ma2, rho, tuple(t for t in mb if t[0].kind != PARAM))
                        cb = cb * sgn
                    v = table.get(key, 0) + ca * cb * r * scale
                    if v:
                        table[key] = v
                    else:
                        table.pop(key, None)
        if not table:
            self.nonlocal_.pop(P, None)

    def iadd(self, other: "LinOp", scale=Fraction(1)) -> "LinOp":
        for k, c in other.local.items():
            self._add_local(k, c * scale)
        for P, t in other.nonlocal_.items():
            table = self.nonlocal_.setdefault(P, {})
            for key, v in t.items():
                nv = table.get(key, 0) + v * scale
                if nv:
                    table[key] = nv
                else:
                    table.pop(key, None)
            if not table:
                self.nonlocal_.pop(P, None)
        return self

    def copy(self) -> "LinOp":
        return LinOp(self.jet, dict(self.local), {P: dict(t) for P, t in self.nonlocal_.items()})

    # algebra
    def __add__(self, other) -> "LinOp":
        return self.copy().iadd(_as_op(other, self.jet))

    __radd__ = __add__

    def __sub__(self, other) -> "LinOp":
        return self.copy().iadd(_as_op(other, self.jet), Fraction(-1))

    def __rsub__(self, other) -> "LinOp":
        return _as_op(other, self.jet) - self

    def __neg__(self) -> "LinOp":
        return LinOp(self.jet).iadd(self, Fraction(-1))

    def __mul__(self, other) -> "LinOp":
        """Composition with an operator, or right multiplication by a function."""
        return self.compose(_as_op(other, self.jet))

    def __rmul__(self, other) -> "LinOp":
        return _as_op(other, self.jet).compose(self)

    __matmul__ = __mul__

    def compose(self, other: "LinOp") -> "LinOp":
        D = self.jet.D
        out = LinOp(self.jet)
        for i, a in self.local.items():
            for j, b in other.local.items():
                bk = b
                for k in range(i + 1):
                    if k:
                        bk = D(bk)
                    out._add_local(i - k + j, a * bk * comb(i, k))
            for P, t in other.nonlocal_.items():
                for (mL, rho, mR), v in t.items():
                    mk = Expr({mL: Fraction(1)})
                    for k in range(i + 1):
                        if k:
                            mk = D(mk)
                        out._add_sandwich(a * mk, P, i - k + rho, Expr({mR: Fraction(1)}),
                                          v * comb(i, k))
        for P, t in self.nonlocal_.items():
            if other.nonlocal_:
                raise NotImplementedError("composition of two nonlocal operators")
            for (mL, rho, mR), v in t.items():
                left = Expr({mL: Fraction(1)})
                for j, b in other.local.items():
                    nb = Expr({mR: Fraction(1)}) * b
                    for l in range(j + 1):
                        c = comb(j, l) * (-1) ** (j - l)
                        out._add_sandwich(left, P, rho + l, D(nb, j - l), v * c)
        return out

    def adjoint(self) -> "LinOp":
        D = self.jet.D
        out = LinOp(self.jet)
        for k, a in self.local.items():
            ak = a
            derivs = [a]
            for _ in range(k):
                ak = D(ak)
                derivs.append(ak)
            for l in range(k + 1):
                out._add_local(l, derivs[k - l] * ((-1) ** k * comb(k, l)))
        for P, t in self.nonlocal_.items():
            deg = len(P) - 1
            star = [c * (-1) ** k for k, c in enumerate(P)]
            lead, Ps = _monic(star)
            for (mL, rho, mR), v in t.items():
                out._add_sandwich(Expr({mR: Fraction(1)}), Ps, rho, Expr({mL: Fraction(1)}),
                                  v * (-1) ** rho / lead)
            del deg
        return out

    def is_zero(self) -> bool:
        return not self.local and not self.nonlocal_

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinOp):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return id(self)

    def order(self) -> int:
        return max(self.local, default=-1)

    def is_local(self) -> bool:
        return not self.nonlocal_

    def scale(self, c) -> "LinOp":
        c = as_expr(c)
        if c.is_const():
            return LinOp(self.jet).iadd(self, c.const_value())
        return LinOp.mul(self.jet, c).compose(self)

    def subs(self, bindings) -> "LinOp":
        """Substitute into coefficients (local part only)."""
        if self.nonlocal_:
            out = LinOp(self.jet)
            for P, t in self.nonlocal_.items():
                for (mL, rho, mR), v in t.items():
                    a = self.jet.substitute(Expr({mL: v}), bindings)
                    b = self.jet.substitute(Expr({mR: Fraction(1)}), bindings)
                    out._add_sandwich(a, P, rho, b)
        else:
            out = LinOp(self.jet)
        for k, c in self.local.items():
            out._add_local(k, self.jet.substitute(c, bindings))
        return out

    def apply_parts(self, X, groups: dict) -> Expr:
        """Local image of ``X``; ``Inv`` arguments are accumulated in ``groups``.

        ``groups`` maps ``(P, left monomial)`` to the expression ``Inv(P)`` acts on.
        """
        X = as_expr(X)
        D = self.jet.D
        out = Expr()
        for k, c in self.local.items():
            out = out + c * D(X, k)
        for P, t in self.nonlocal_.items():
            for (mL, rho, mR), v in t.items():
                y = D(Expr({mR: v}) * X, rho)
                groups[(P, mL)] = groups.get((P, mL), Expr()) + y
        return out

    def apply(self, X, resolve=None) -> Expr:
        """Apply to an expression; ``Inv`` parts go through ``resolve(P, Y)``."""
        groups: dict = {}
        out = self.apply_parts(X, groups)
        return out + resolve_groups(self.jet, groups, resolve)

    def __str__(self) -> str:
        return op_text(self)

    def __repr__(self) -> str:
        return f"LinOp({self})"


def resolve_groups(jet, groups: dict, resolve=None) -> Expr:
    resolve = resolve or default_resolver(jet)
    out = Expr()
    for (P, mL) in sorted(groups, key=repr):
        Y = groups[(P, mL)]
        if Y.terms:
            out = out + Expr({mL: Fraction(1)}) * resolve(P, Y)
    return out


def _as_op(x, jet) -> LinOp:
    if isinstance(x, LinOp):
        return x
    return LinOp.mul(jet, x)


def default_resolver(jet: JetSpace, generators=None):
    """Resolve ``Inv(d)`` applications through declared generators."""

    def resolve(P, Y):
        if P != (Fraction(0), Fraction(1)):
            raise UnresolvedNonlocal(f"unresolved nonlocal: Inv({_poly_text(P, jet.var)}) applied to {Y}")
        try:
            return integrate(Y, jet, generators)
        except UnresolvedNonlocal as exc:
            raise UnresolvedNonlocal(f"unresolved nonlocal: {exc}") from None

    return resolve


def op_text(L: LinOp) -> str:
    from .symcore.parse import to_text

    var = L.jet.var
    parts = []
    for k in sorted(L.local, reverse=True):
        c = to_text(L.local[k])
        d = "" if k == 0 else (f"D{var}" if k == 1 else f"D{var}^{k}")
        if not d:
            parts.append(f"({c})")
        elif c == "1":
            parts.append(d)
        else:
            parts.append(f"({c})*{d}")
    for P in sorted(L.nonlocal_):
        for (mL, rho, mR), v in sorted(L.nonlocal_[P].items(), key=lambda kv: repr(kv[0])):
            a = to_text(Expr({mL: v}))
            b = to_text(Expr({mR: Fraction(1)}))
            d = "" if rho == 0 else (f"*D{var}" if rho == 1 else f"*D{var}^{rho}")
            parts.append(f"({a})*inv({_poly_text(P, var)}){d}*({b})")
    return " + ".join(parts) if parts else "0"


@dataclass
class MatrixOp:
    """Rectangular array of :class:`LinOp` acting on column vectors."""

    rows: list
    jet: JetSpace = field(repr=False)
    order: tuple = ()  # component names, in operator order

    @classmethod
    def from_rows(cls, jet, rows, order=()) -> "MatrixOp":
        return cls([[_as_op(e, jet) for e in row] for row in rows], jet, tuple(order))

    @classmethod
    def identity(cls, jet, n: int, order=()) -> "MatrixOp":
        return cls.from_rows(jet, [[1 if i == j else 0 for j in range(n)] for i in range(n)], order)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def adjoint(self) -> "MatrixOp":
        n, m = self.shape
        return MatrixOp([[self.rows[i][j].adjoint() for i in range(n)] for j in range(m)],
                        self.jet, self.order)

    def __add__(self, other: "MatrixOp") -> "MatrixOp":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return MatrixOp([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
                        self.jet, self.order)

    def __neg__(self) -> "MatrixOp":
        return MatrixOp([[-a for a in r] for r in self.rows], self.jet, self.order)

    def __sub__(self, other: "MatrixOp") -> "MatrixOp":
        return self + (-other)

    def scale(self, c) -> "MatrixOp":
        return MatrixOp([[a.scale(c) for a in r] for r in self.rows], self.jet, self.order)

    def __matmul__(self, other: "MatrixOp") -> "MatrixOp":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError(f"cannot compose {self.shape} with {other.shape}")
        rows = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = LinOp(self.jet)
                for l in range(k):
                    a, b = self.rows[i][l], other.rows[l][j]
                    if a.is_zero() or b.is_zero():
                        continue
                    acc.iadd(a.compose(b))
                row.append(acc)
            rows.append(row)
        return MatrixOp(rows, self.jet, self.order)

    def apply(self, vec, resolve=None) -> list:
        n, m = self.shape
        if len(vec) != m:
            raise ValueError(f"vector of length {len(vec)} for operator of shape {self.shape}")
        vec = [self.jet.parse(v) if isinstance(v, str) else as_expr(v) for v in vec]
        out = []
        for i in range(n):
            # Inv arguments are pooled across the row before resolution
            groups: dict = {}
            acc = Expr()
            for j in range(m):
                acc = acc + self.rows[i][j].apply_parts(vec[j], groups)
            out.append(acc + resolve_groups(self.jet, groups, resolve))
        return out

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def subs(self, bindings) -> "MatrixOp":
        return MatrixOp([[a.subs(bindings) for a in r] for r in self.rows], self.jet, self.order)

    def select(self, idx: Sequence[int]) -> "MatrixOp":
        order = tuple(self.order[i] for i in idx) if self.order else ()
        return MatrixOp([[self.rows[i][j] for j in idx] for i in idx], self.jet, order)

    def __str__(self) -> str:
        return "[" + ",\n ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self.rows) + "]"


def op_apply(L: MatrixOp, V, resolve=None) -> list:
    return L.apply(V, resolve)


def op_adjoint(L):
    return L.adjoint()


def op_compose(L1: LinOp, L2: LinOp) -> LinOp:
    return L1.compose(L2)


def is_skew_adjoint(L, name: str = "skew", model: str = "", anchor: str = "") -> CheckReport:
    """Pass iff ``L* + L`` is the zero operator."""
    import time

    t0 = time.perf_counter()
    if isinstance(L, LinOp):
        res = L.adjoint() + L
        ok = res.is_zero()
        text = str(res)
    else:
        res = L.adjoint() + L
        ok = res.is_zero()
        text = "0" if ok else "\n".join(
            f"({i + 1},{j + 1}): {a}" for i, r in enumerate(res.rows) for j, a in enumerate(r)
            if not a.is_zero())
    return CheckReport(name, model, "pass" if ok else "fail", text if not ok else "0", anchor,
                       time.perf_counter() - t0)


# variational calculus

@dataclass(frozen=True)
class Functional:
    density: Expr
    variables: tuple


def variational_derivative(H, var: str, jet: JetSpace) -> Expr:
    """Euler operator; densities with nonlocal generators are rejected."""
    dens = H.density if isinstance(H, Functional) else as_expr(H)
    gens = [a for a in dens.atoms() if a.kind not in (0, VAR)]
    if gens:
        raise ValueError(f"density contains nonlocal symbols {sorted(str(a) for a in gens)}")
    return jet.euler(dens, var)


def frechet_derivative(exprs, variables: Sequence[str], jet: JetSpace) -> MatrixOp:
    rows = []
    for E in exprs:
        E = jet.parse(E) if isinstance(E, str) else as_expr(E)
        row = []
        for v in variables:
            local = {}
            for a in E.atoms():
                if a.name == v and a.kind == VAR:
                    local[a.order] = diff_atom(E, a)
            row.append(LinOp(jet, local))
        rows.append(row)
    return MatrixOp(rows, jet, tuple(variables))


def miura_conjugate(K: MatrixOp, exprs, variables, jet: JetSpace) -> MatrixOp:
    """``Dphi o K o Dphi*`` for the map ``variables -> exprs``."""
    Dphi = frechet_derivative(exprs, variables, jet)
    return Dphi @ K @ Dphi.adjoint()


def column(jet, entries) -> MatrixOp:
    return MatrixOp.from_rows(jet, [[e] for e in entries])


__all__ = [
    "Functional", "LinOp", "MatrixOp", "UnresolvedNonlocal", "column", "default_resolver",
    "frechet_derivative", "is_skew_adjoint", "miura_conjugate", "op_adjoint", "op_apply",
    "op_compose", "op_text", "variational_derivative", "ONE_MONO",
]
