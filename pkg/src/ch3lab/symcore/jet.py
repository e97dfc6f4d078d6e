"""Jet-space context: variable tables, total derivatives, substitution, rewriting."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .expr import (
    GEN,
    ODD,
    ODDGEN,
    ONE,
    PARAM,
    VAR,
    ZERO,
    Atom,
    Expr,
    as_expr,
    diff_atom,
    mono_from,
    mono_mul,
    split_factor,
)


class SymbolError(KeyError):
    """Unknown symbol or misuse of a declared one."""


class UnresolvedTimeDerivative(ValueError):
    pass


class RewriteBudgetExceeded(RuntimeError):
    pass


@dataclass
class Generator:
    """A declared antiderivative symbol, known only through its spatial derivative."""

    name: str
    rule: Expr | None = None
    odd: bool = False
    inverse_allowed: bool = False
    time_rule: Expr | None = None


DEFAULT_PARAMS = ("lam", "mu")


class JetSpace:
    """Variable and generator tables for one model, with one spatial variable."""

    def __init__(
        self,
        var: str = "x",
        variables: Iterable[str] = (),
        odd: Iterable[str] = (),
        params: Iterable[str] = (),
    ):
        if var not in ("x", "y"):
            raise ValueError("spatial variable must be 'x' or 'y'")
        self.var = var
        self.variables = list(dict.fromkeys(variables))
        self.odd = list(dict.fromkeys(odd))
        self.params = list(dict.fromkeys([*DEFAULT_PARAMS, *params]))
        self.gens: dict[str, Generator] = {}
        self._kinds: dict[str, int] = {}
        for n in self.params:
            self._register(n, PARAM)
        for n in self.variables:
            self._register(n, VAR)
        for n in self.odd:
            self._register(n, ODD)
        self._dcache: dict = {}

    def _register(self, name: str, kind: int) -> None:
        if name in self._kinds and self._kinds[name] != kind:
            raise SymbolError(f"symbol {name!r} declared twice with different roles")
        self._kinds[name] = kind

    def copy(self) -> "JetSpace":
        new = JetSpace(self.var, self.variables, self.odd, self.params)
        for g in self.gens.values():
            new.gens[g.name] = Generator(g.name, g.rule, g.odd, g.inverse_allowed, g.time_rule)
            new._kinds[g.name] = ODDGEN if g.odd else GEN
        return new

    # declarations
    def declare(self, name: str, rule=None, odd: bool = False, inverse_allowed: bool = False,
                time_rule=None) -> Generator:
        """Declare (or redefine) a generator; ``rule`` may be an Expr or text."""
        self._register(name, ODDGEN if odd else GEN)
        g = self.gens.get(name) or Generator(name, None, odd, inverse_allowed)
        g.odd, g.inverse_allowed = odd, inverse_allowed
        self.gens[name] = g
        if rule is not None:
            g.rule = self.parse(rule) if isinstance(rule, str) else rule
        if time_rule is not None:
            g.time_rule = self.parse(time_rule) if isinstance(time_rule, str) else time_rule
        self._dcache.clear()
        return g

    def kind(self, name: str) -> int:
        try:
            return self._kinds[name]
        except KeyError:
            raise SymbolError(f"unknown symbol {name!r}") from None

    def has(self, name: str) -> bool:
        return name in self._kinds

    def atom(self, name: str, order: int = 0) -> Atom:
        k = self.kind(name)
        if order and k not in (VAR, ODD):
            raise SymbolError(f"{name!r} has no jet coordinates")
        return Atom(k, name, order, self.var if order else "")

    def sym(self, name: str, order: int = 0) -> Expr:
        return Expr.atom(self.atom(name, order))

    def syms(self, names: str) -> list[Expr]:
        return [self.sym(n) for n in names.split()]

    def parse(self, text: str) -> Expr:
        from .parse import parse

        return parse(text, self)

    def symbols_of(self, E: Expr) -> set[str]:
        return {a.name for a in E.atoms()}

    # differentiation
    def _datom(self, a: Atom) -> Expr:
        if a.kind == PARAM:
            return ZERO
        if a.kind in (VAR, ODD):
            if a.sp and a.sp != self.var:
                raise SymbolError(f"jet {a} is not a {self.var}-jet")
            return Expr.atom(a.shifted(1, self.var))
        g = self.gens.get(a.name)
        if g is None or g.rule is None:
            raise SymbolError(f"generator {a.name!r} has no derivative rule")
        return g.rule

    def _dmono(self, m) -> Expr:
        hit = self._dcache.get(m)
        if hit is not None:
            return hit
        out: dict = {}
        for a, e in m:
            da = self._datom(a)
            if not da.terms:
                continue
            sign, _, rest = split_factor(m, a)
            if a.kind < ODD and e != 1:
                odd = [b for b, _ in rest if b.kind >= ODD]
                even = {b: x for b, x in rest if b.kind < ODD}
                even[a] = e - 1
                _, rest = mono_from(even, odd)
            for m2, c2 in da.terms.items():
                s, nm = mono_mul(m2, rest) if a.kind >= ODD else mono_mul(rest, m2)
                if not s:
                    continue
                v = out.get(nm, 0) + c2 * e * sign * s
                if v:
                    out[nm] = v
                else:
                    del out[nm]
        res = Expr(out)
        self._dcache[m] = res
        return res

    def D(self, E, n: int = 1) -> Expr:
        """Total spatial derivative, applied ``n`` times."""
        E = as_expr(E)
        for _ in range(n):
            out: dict = {}
            for m, c in E.terms.items():
                for m2, c2 in self._dmono(m).terms.items():
                    v = out.get(m2, 0) + c * c2
                    if v:
                        out[m2] = v
                    else:
                        del out[m2]
            E = Expr(out)
        return E

    def Dt(self, E, evolution: Mapping[str, Expr]) -> Expr:
        """Time derivative through evolution-substitution rules.

        ``evolution`` maps base variables (and generators) to their time
        derivatives; jets of variables differentiate the rule spatially.
        """
        E = as_expr(E)
        out = ZERO
        cache: dict = {}
        for a in sorted(E.atoms()):
            if a.kind == PARAM:
                continue
            if a.name in evolution:
                rhs = as_expr(evolution[a.name])
            elif a.kind in (GEN, ODDGEN) and self.gens[a.name].time_rule is not None:
                rhs = self.gens[a.name].time_rule
            else:
                raise UnresolvedTimeDerivative(f"no evolution rule for {a.name!r}")
            key = (a.name, a.order)
            if key not in cache:
                cache[key] = self.D(rhs, a.order)
            out = out + diff_atom(E, a) * cache[key]
        return out

    def substitute(self, E, bindings: Mapping[str, object],
                   protected: Iterable[str] = ()) -> Expr:
        """Replace base symbols by expressions; jets become derivatives of the binding."""
        E = as_expr(E)
        protected = set(protected)
        binds = {}
        for k, v in bindings.items():
            if k in protected:
                raise SymbolError(f"cannot bind {k!r}: it is the target of an active rewrite rule")
            binds[k] = self.parse(v) if isinstance(v, str) else as_expr(v)
        if not binds:
            return E
        repl: dict = {}

        def image(a: Atom, e: int) -> Expr:
            key = (a, e)
            if key not in repl:
                base = binds[a.name]
                if a.order:
                    base = self.D(base, a.order)
                repl[key] = base ** e
            return repl[key]

        out = ZERO
        for m, c in E.terms.items():
            if not any(a.name in binds for a, _ in m):
                out = out + Expr({m: c})
                continue
            term = Expr.const(c)
            for a, e in m:
                if a.name in binds:
                    term = term * image(a, e)
                else:
                    term = term * Expr.atom(a, e) if a.kind < ODD else term * Expr.atom(a)
                if not term.terms:
                    break
            out = out + term
        return out

    def euler(self, E, name: str) -> Expr:
        """Variational derivative with respect to the base variable ``name``."""
        E = as_expr(E)
        orders = sorted({a.order for a in E.atoms() if a.name == name})
        out = ZERO
        for k in orders:
            part = diff_atom(E, self.atom(name, k))
            for _ in range(k):
                part = -self.D(part)
            out = out + part
        return out


@dataclass
class RewriteSystem:
    """Ordered jet rules ``name_(order) -> rhs``; jets above the order use derivatives."""

    rules: list = field(default_factory=list)  # list of (name, order, Expr)
    kind: str = "constraint-reduction"
    budget: int = 200

    def targets(self) -> set[str]:
        return {n for n, _, _ in self.rules}

    def without(self, name: str) -> "RewriteSystem":
        return RewriteSystem([r for r in self.rules if r[0] != name], self.kind, self.budget)


def reduce_modulo(E, R: RewriteSystem, jet: JetSpace) -> Expr:
    """Normal form of ``E`` under the rewrite system ``R`` (applied to a fixed point)."""
    E = as_expr(E)
    if not R.rules:
        return E
    table = {n: (o, rhs) for n, o, rhs in R.rules}
    cache: dict = {}

    def image(a: Atom) -> Expr:
        if a not in cache:
            o, rhs = table[a.name]
            cache[a] = jet.D(rhs, a.order - o)
        return cache[a]

    for _ in range(R.budget):
        hits = [a for a in E.atoms() if a.name in table and a.order >= table[a.name][0]
                and a.kind in (VAR, ODD)]
        if not hits:
            return E
        hitset = set(hits)
        out: dict = {}
        rest_terms = []
        for m, c in E.terms.items():
            if not any(a in hitset for a, _ in m):
                rest_terms.append((m, c))
                continue
            term = Expr.const(c)
            for a, e in m:
                if a in hitset:
                    if e < 0:
                        raise ValueError(f"rewrite target {a} appears with negative power")
                    term = term * image(a) ** e
                else:
                    term = term * (Expr.atom(a, e) if a.kind < ODD else Expr.atom(a))
            for m2, c2 in term.terms.items():
                rest_terms.append((m2, c2))
        E = Expr.from_terms(rest_terms)
    raise RewriteBudgetExceeded(f"rewrite budget of {R.budget} passes exceeded")


def rule(jet: JetSpace, lhs: str, rhs) -> tuple:
    """Build a rule from text such as ``rule(J, "a_yy", "a*(Q1_y+Q1^2) - Q2")``."""
    from .parse import split_jet

    name, order = split_jet(lhs, jet)
    if jet.kind(name) not in (VAR, ODD):
        raise SymbolError(f"rule target {lhs!r} is not a jet variable")
    return (name, order, jet.parse(rhs) if isinstance(rhs, str) else as_expr(rhs))


def fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


__all__ = [
    "Generator",
    "JetSpace",
    "RewriteSystem",
    "RewriteBudgetExceeded",
    "SymbolError",
    "UnresolvedTimeDerivative",
    "reduce_modulo",
    "rule",
    "ONE",
]
