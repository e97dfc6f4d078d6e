"""Functional multivectors and the prolongation test of the Jacobi identity.

Integrands are :class:`Expr` values homogeneous in the odd atoms.  A local
integrand ``w`` of odd degree ``d`` is normalized through the odd Euler
operators,

    w  =  (1/d) sum_i theta_i ^ E_i(w)  +  D(R),

which is unique on each class modulo total derivatives.  Odd generators such
as ``e = Inv(D)(Q2 theta2 - Q3 theta3)`` are kept undifferentiated; their
coefficients are normalized in turn, the exact remainder being moved onto the
generator by ``int D(R) ^ W = -int R ^ D(W)``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .opalg import LinOp, MatrixOp, default_resolver, is_skew_adjoint
from .report import CheckReport
from .symcore import Expr, JetSpace, as_expr, collect, diff_atom
from .symcore.expr import ODD, ODDGEN, PARAM, VAR
from .symcore.integrate import UnresolvedNonlocal, integrate
from .symcore.parse import to_text


class UnsupportedForm(ValueError):
    pass


def _odd_count(m) -> int:
    return sum(1 for a, _ in m if a.kind >= ODD)


def odd_degree(E: Expr) -> int:
    degs = E.odd_degrees()
    if len(degs) > 1:
        raise UnsupportedForm(f"integrand is not homogeneous in odd atoms: {sorted(degs)}")
    return degs.pop() if degs else 0


def local_normal_form(w: Expr, jet: JetSpace) -> tuple[Expr, Expr]:
    """Return ``(nf, R)`` with ``w == nf + D(R)`` and ``nf`` canonical."""
    if not w.terms:
        return Expr(), Expr()
    d = odd_degree(w)
    if d == 0:
        raise UnsupportedForm("degree-0 densities have no odd normal form")
    if any(a.kind == ODDGEN for a in w.atoms()):
        raise UnsupportedForm("local normal form called on a nonlocal integrand")
    inv_d = Fraction(1, d)
    by_base: dict = {}
    for a in w.atoms():
        if a.kind == ODD:
            by_base.setdefault(a.name, []).append(a)
    nf = Expr()
    R = Expr()
    for name in sorted(by_base):
        theta = jet.sym(name)
        Ei = Expr()
        for a in sorted(by_base[name], key=lambda t: t.order):
            A = diff_atom(w, a)
            n = a.order
            term = A
            # R gets sum_{j<n} theta^(n-1-j) ^ (-D)^j A
            for j in range(n):
                R = R + jet.sym(name, n - 1 - j) * term * inv_d
                term = -jet.D(term)
            Ei = Ei + term
        nf = nf + theta * Ei * inv_d
    return nf, R


def _split_nonlocal(E: Expr) -> dict:
    """Group terms by the tuple of odd generators they contain."""
    parts: dict = {}
    for m, c in E.terms.items():
        S = tuple(a for a, _ in m if a.kind == ODDGEN)
        rest = tuple((a, e) for a, e in m if a.kind != ODDGEN)
        parts.setdefault(S, {})
        v = parts[S].get(rest, 0) + c
        if v:
            parts[S][rest] = v
        else:
            parts[S].pop(rest, None)
    return {S: Expr(t) for S, t in parts.items() if t}


def _wedge(atoms) -> Expr:
    out = Expr.const(1)
    for a in atoms:
        out = out * Expr.atom(a)
    return out


def normalize_integrand(E: Expr, jet: JetSpace) -> dict:
    """Canonical pieces ``{generator tuple: local coefficient}`` of an integrand."""
    d = odd_degree(E)
    parts = _split_nonlocal(E)
    done: dict = {}
    while parts:
        S = max(parts, key=lambda s: (len(s), s))
        X = parts.pop(S)
        if not X.terms:
            continue
        if not S:
            nf, _ = local_normal_form(X, jet)
            if nf.terms:
                done[S] = nf
            continue
        if len(S) == d:
            done[S] = done.get(S, Expr()) + X
            continue
        nf, R = local_normal_form(X, jet)
        if nf.terms:
            done[S] = nf
        if R.terms:
            corr = -(R * jet.D(_wedge(S)))
            for S2, X2 in _split_nonlocal(corr).items():
                if len(S2) >= len(S):
                    raise UnsupportedForm(f"generator rule for {S} is not local")
                parts[S2] = parts.get(S2, Expr()) + X2
    return {S: done[S] for S in sorted(done, key=lambda s: (len(s), s)) if done[S].terms}


@dataclass
class FunctionalForm:
    integrand: Expr
    jet: JetSpace

    @property
    def degree(self) -> int:
        return odd_degree(self.integrand)

    def __add__(self, other: "FunctionalForm") -> "FunctionalForm":
        return FunctionalForm(self.integrand + other.integrand, self.jet)

    def __sub__(self, other: "FunctionalForm") -> "FunctionalForm":
        return FunctionalForm(self.integrand - other.integrand, self.jet)

    def is_zero(self) -> bool:
        return wedge_normalize(self).integrand.is_zero()

    def __str__(self) -> str:
        return f"int[{to_text(self.integrand)}]"


def wedge_normalize(F: FunctionalForm) -> FunctionalForm:
    pieces = normalize_integrand(F.integrand, F.jet)
    out = Expr()
    for S, X in pieces.items():
        out = out + X * _wedge(S)
    return FunctionalForm(out, F.jet)


def _theta_names(n: int) -> list[str]:
    return [f"theta{i + 1}" for i in range(n)]


def characteristic(L: MatrixOp, variables, resolve=None) -> list[Expr]:
    """``L theta`` with nonlocal parts resolved to declared odd generators."""
    jet = L.jet
    thetas = [jet.sym(t) for t in _theta_names(len(variables))]
    return L.apply(thetas, resolve or default_resolver(jet))


def theta_form(L: MatrixOp, variables, char=None) -> FunctionalForm:
    jet = L.jet
    char = char if char is not None else characteristic(L, variables)
    integrand = Expr()
    for i, Li in enumerate(char):
        integrand = integrand + jet.sym(f"theta{i + 1}") * Li
    return FunctionalForm(integrand * Fraction(1, 2), jet)


def _prv_coeffs(X: Expr, char: dict, jet: JetSpace, cache: dict) -> Expr:
    out = Expr()
    for a in sorted(X.atoms()):
        if a.kind == VAR:
            if a.name not in char:
                continue
            key = (a.name, a.order)
            if key not in cache:
                cache[key] = jet.D(char[a.name], a.order)
            out = out + cache[key] * diff_atom(X, a)
        elif a.kind not in (PARAM, ODD, ODDGEN):
            raise UnsupportedForm(f"prolongation through even generator {a.name!r}")
    return out


def prolong(L: MatrixOp, F: FunctionalForm, variables, char=None) -> FunctionalForm:
    """``pr v_{L theta}`` of ``F``, new odd factors placed in front, normalized."""
    return wedge_normalize(prolong_raw(L, F, variables, char))


def prolong_raw(L: MatrixOp, F: FunctionalForm, variables, char=None) -> FunctionalForm:
    """As :func:`prolong` but without the final normalization."""
    jet = L.jet
    char = char if char is not None else characteristic(L, variables)
    cmap = dict(zip(variables, char))
    cache: dict = {}
    pieces = normalize_integrand(F.integrand, jet)
    out = Expr()
    for S, X in pieces.items():
        if len(S) > 1:
            raise UnsupportedForm("prolongation of terms with several odd generators")
        out = out + _prv_coeffs(X, cmap, jet, cache) * _wedge(S)
        if S:
            g = jet.gens[S[0].name]
            Pi = integrate(X, jet)
            Z = _prv_coeffs(g.rule, cmap, jet, cache)
            out = out + Pi * Z
    return FunctionalForm(out, jet)


def graded_components(E: Expr, params=("alpha", "beta")) -> dict:
    """Split by exponents of the pencil parameters present in the jet."""
    atoms = [a for a in {a for a in E.atoms() if a.kind == PARAM and a.name in params}]
    atoms.sort()
    if not atoms:
        return {(): E}
    return collect(E, atoms)


def _grade_label(key, atoms) -> str:
    parts = []
    for a, e in zip(atoms, key):
        if e:
            parts.append(a if e == 1 else f"{a}^{e}")
    return "*".join(parts) or "1"


def jacobi_check(L: MatrixOp, variables, name: str = "jacobi", model: str = "",
                 anchor: str = "", params=("alpha", "beta")) -> CheckReport:
    """Pass iff ``pr v_{L theta} Theta_L`` normalizes to zero."""
    t0 = time.perf_counter()
    skew = is_skew_adjoint(L)
    if not skew.passed:
        return CheckReport(name, model, "error", "operator is not skew-adjoint: " + skew.residual,
                           anchor, time.perf_counter() - t0)
    try:
        char = characteristic(L, variables)
        Theta = theta_form(L, variables, char)
        raw = prolong_raw(L, Theta, variables, char)
        pool = [raw.integrand, Theta.integrand, *char]
        present = sorted({a.name for E in pool for a in E.atoms()
                          if a.kind == PARAM and a.name in params})
        atoms = [L.jet.atom(p) for p in present]
        comps = collect(raw.integrand, atoms) if atoms else {(): raw.integrand}
        if atoms:
            # every grade reachable as (grade of Theta) + (grade of L theta) is reported
            gl = {k for E in char for k in collect(E, atoms)}
            for k1 in collect(Theta.integrand, atoms):
                for k2 in gl:
                    comps.setdefault(tuple(x + y for x, y in zip(k1, k2)), Expr())
        normal = {key: wedge_normalize(FunctionalForm(c, L.jet)).integrand
                  for key, c in comps.items()}
    except (UnresolvedNonlocal, UnsupportedForm, NotImplementedError) as exc:
        return CheckReport(name, model, "error", str(exc), anchor, time.perf_counter() - t0)
    details = {}
    total = Expr()
    for key, nf in normal.items():
        mono = Expr.const(1)
        for a, e in zip(atoms, key):
            mono = mono * Expr.atom(a, e) if e else mono
        total = total + mono * nf
        if atoms:
            details[_grade_label(key, present)] = to_text(nf)
    ok = total.is_zero()
    return CheckReport(name, model, "pass" if ok else "fail", to_text(total), anchor,
                       time.perf_counter() - t0, details)


def pencil(K1: MatrixOp, K2: MatrixOp, params=("alpha", "beta")) -> MatrixOp:
    jet = K1.jet
    a, b = (jet.sym(p) for p in params)
    return K1.scale(a) + K2.scale(b)


def compatibility_check(K1: MatrixOp, K2: MatrixOp, variables, name: str = "compatibility",
                        model: str = "", anchor: str = "") -> CheckReport:
    jet = K1.jet
    for p in ("alpha", "beta"):
        if not jet.has(p):
            raise ValueError("pencil parameters alpha, beta must be declared in the jet space")
    rep = jacobi_check(pencil(K1, K2), variables, name, model, anchor)
    return rep


def scalar_space(var: str = "x", name: str = "v") -> JetSpace:
    """One dependent variable with its odd partner, for single-operator checks."""
    return JetSpace(var, [name], ["theta1"], ["alpha", "beta"])


def scalar_op(jet: JetSpace, text_terms) -> MatrixOp:
    """``[[L]]`` from ``[(coefficient text, order), ...]`` read as ``sum c o d^k``."""
    L = LinOp(jet)
    for c, k in text_terms:
        L = L + LinOp.mul(jet, c).compose(LinOp.d(jet, k))
    return MatrixOp([[L]], jet)


__all__ = [
    "FunctionalForm", "UnsupportedForm", "characteristic", "compatibility_check",
    "graded_components", "jacobi_check", "local_normal_form", "normalize_integrand",
    "pencil", "prolong", "scalar_op", "scalar_space", "theta_form", "wedge_normalize",
]
