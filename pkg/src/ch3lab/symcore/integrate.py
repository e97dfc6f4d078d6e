"""Exact antiderivatives in the jet ring extended by declared generators.

An expression ``E`` is resolved as ``D(Y)`` where ``Y`` is a rational
combination of declared generators and of local monomials obtained from the
terms of ``E`` by lowering one jet order.  The coefficients come from an exact
sparse linear solve; integration constants are fixed to zero.
"""
from __future__ import annotations

from fractions import Fraction

from .expr import ODD, PARAM, VAR, Expr, collect, mono_from
from .jet import JetSpace


class UnresolvedNonlocal(ValueError):
    """Raised when an antiderivative is not expressible with the declared generators."""


def _lowered(m) -> list:
    out = []
    for a, e in m:
        if a.kind not in (VAR, ODD) or a.order == 0:
            continue
        low = a.shifted(-1, a.sp)
        even = {b: x for b, x in m if b.kind < ODD}
        odd = [b for b, _ in m if b.kind >= ODD]
        if a.kind == ODD:
            if low in odd:
                continue
            odd[odd.index(a)] = low
        else:
            even[a] = e - 1
            even[low] = even.get(low, 0) + 1
        sign, nm = mono_from(even, odd)
        if sign:
            out.append(nm)
    return out


def solve_linear(columns: list[dict], rhs: dict) -> list[Fraction] | None:
    """Solve ``sum_j x_j * columns[j] == rhs`` exactly; free unknowns are set to zero."""
    rows: dict = {}
    for j, col in enumerate(columns):
        for r, v in col.items():
            rows.setdefault(r, {})[j] = Fraction(v)
    for r in rhs:
        rows.setdefault(r, {})
    pivots: dict[int, tuple[dict, Fraction]] = {}
    order: list[int] = []
    for r in sorted(rows, key=repr):
        eq = dict(rows[r])
        b = Fraction(rhs.get(r, 0))
        changed = True
        while changed:
            changed = False
            for j in [j for j in eq if j in pivots]:
                f = eq.pop(j, 0)
                if not f:
                    continue
                peq, pb = pivots[j]
                for k, v in peq.items():
                    nv = eq.get(k, 0) - f * v
                    if nv:
                        eq[k] = nv
                    else:
                        eq.pop(k, None)
                b -= f * pb
                changed = True
        if not eq:
            if b:
                return None
            continue
        p = min(eq)
        inv = 1 / eq.pop(p)
        peq = {k: v * inv for k, v in eq.items()}
        pivots[p] = (peq, b * inv)
        order.append(p)
    x = [Fraction(0)] * len(columns)
    for p in reversed(order):
        peq, pb = pivots[p]
        x[p] = pb - sum(v * x[k] for k, v in peq.items())
    return x


def integrate(E: Expr, jet: JetSpace, generators=None, rounds: int = 3) -> Expr:
    """Return ``Y`` with ``jet.D(Y) == E``, or raise :class:`UnresolvedNonlocal`."""
    if not E.terms:
        return Expr()
    params = sorted({a for a in E.atoms() if a.kind == PARAM})
    if params:
        # constants pass through the antiderivative: solve per parameter monomial
        out = Expr()
        for key, part in collect(E, params).items():
            even = {a: e for a, e in zip(params, key) if e}
            _, pm = mono_from(even, ())
            out = out + Expr({pm: Fraction(1)}) * integrate(part, jet, generators, rounds)
        return out
    names = sorted(jet.gens) if generators is None else list(generators)
    degs = E.odd_degrees()
    cands: list = []
    seen: set = set()
    frontier = list(E.terms)
    for n in names:
        g = jet.gens[n]
        # a bare generator only helps when its odd degree occurs in E
        if g.rule is None or (1 if g.odd else 0) not in degs:
            continue
        m = ((jet.atom(n), 1),)
        seen.add(m)
        cands.append(m)
        frontier.extend(g.rule.terms)
    images: list = []
    for _ in range(rounds):
        new = []
        for m in frontier:
            for c in _lowered(m):
                if c not in seen:
                    seen.add(c)
                    new.append(c)
        cands.extend(new)
        while len(images) < len(cands):
            images.append(jet.D(Expr({cands[len(images)]: Fraction(1)})))
        sol = solve_linear([im.terms for im in images], E.terms)
        if sol is not None:
            return Expr.from_terms((m, x) for m, x in zip(cands, sol) if x)
        frontier = [m for im in images[-len(new):] for m in im.terms] if new else []
        if not frontier:
            break
    raise UnresolvedNonlocal(f"no antiderivative for {E} over generators {names}")
