"""Exact Laurent polynomials over jet atoms, with odd (Grassmann) atoms.

An :class:`Expr` is a finite sum ``coeff * monomial`` with :class:`fractions.Fraction`
coefficients.  Even atoms commute and may carry negative exponents; odd atoms
anticommute, appear at most once per monomial and always sort after the even
ones.  The parameter ``mu`` is kept reduced through ``mu**2 -> lam``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple

PARAM, VAR, GEN, ODD, ODDGEN = 0, 1, 2, 3, 4
ODD_KINDS = (ODD, ODDGEN)

MU, LAM = "mu", "lam"


class Atom(NamedTuple):
    kind: int
    name: str
    order: int = 0
    sp: str = ""  # spatial variable of the jet, empty at order 0

    @property
    def odd(self) -> bool:
        return self.kind >= ODD

    def shifted(self, n: int, sp: str) -> "Atom":
        k = self.order + n
        return Atom(self.kind, self.name, k, sp if k else "")

    def __str__(self) -> str:
        if self.order == 0:
            return self.name
        if self.order <= 4:
            return f"{self.name}_{self.sp * self.order}"
        return f"D({self.name},{self.sp},{self.order})"

    def __repr__(self) -> str:
        return f"Atom({self})"


Monomial = tuple  # tuple[tuple[Atom, int], ...], sorted by atom

ONE_MONO: Monomial = ()
_LAM_ATOM = Atom(PARAM, LAM)
_MU_ATOM = Atom(PARAM, MU)


def _mu_fix(even: dict) -> None:
    k = even.get(_MU_ATOM)
    if k is None:
        return
    q, rem = divmod(k, 2)
    if rem:
        even[_MU_ATOM] = 1
    else:
        del even[_MU_ATOM]
    if q:
        l = even.get(_LAM_ATOM, 0) + q
        if l:
            even[_LAM_ATOM] = l
        else:
            even.pop(_LAM_ATOM, None)


def mono_from(even: dict, odd: Iterable[Atom]) -> tuple[int, Monomial | None]:
    """Canonical monomial from an exponent map and an ordered odd-factor list."""
    odd = list(odd)
    if len(set(odd)) != len(odd):
        return 0, None
    # sign of the sorting permutation
    sign = 1
    for i in range(len(odd)):
        for j in range(i + 1, len(odd)):
            if odd[i] > odd[j]:
                sign = -sign
    _mu_fix(even)
    items = sorted((a, e) for a, e in even.items() if e)
    items.extend((a, 1) for a in sorted(odd))
    return sign, tuple(items)


_mul_cache: dict = {}


def mono_mul(m1: Monomial, m2: Monomial) -> tuple[int, Monomial | None]:
    key = (m1, m2)
    hit = _mul_cache.get(key)
    if hit is not None:
        return hit
    even: dict = {}
    odd1 = []
    odd2 = []
    for a, e in m1:
        if a.kind >= ODD:
            odd1.append(a)
        else:
            even[a] = e
    for a, e in m2:
        if a.kind >= ODD:
            odd2.append(a)
        else:
            even[a] = even.get(a, 0) + e
    if odd1 and odd2:
        s1 = set(odd1)
        if any(a in s1 for a in odd2):
            res = (0, None)
            _mul_cache[key] = res
            return res
        inv = sum(1 for x in odd1 for y in odd2 if x > y)
        sign = -1 if inv % 2 else 1
        odd = sorted(odd1 + odd2)
    else:
        sign = 1
        odd = odd1 or odd2
    if _MU_ATOM in even:
        _mu_fix(even)
    items = sorted((a, e) for a, e in even.items() if e)
    items.extend((a, 1) for a in odd)
    res = (sign, tuple(items))
    if len(_mul_cache) > 2_000_000:
        _mul_cache.clear()
    _mul_cache[key] = res
    return res


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Expr:
    """Immutable sum of rational multiples of monomials."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict | None = None):
        self.terms = terms if terms is not None else {}
        self._hash = None

    # constructors
    @staticmethod
    def const(c) -> "Expr":
        c = _frac(c)
        return Expr({ONE_MONO: c} if c else {})

    @staticmethod
    def atom(a: Atom, exp: int = 1) -> "Expr":
        if a.kind >= ODD:
            if exp != 1:
                raise ValueError(f"odd atom {a} raised to power {exp}")
            return Expr({((a, 1),): Fraction(1)})
        sign, m = mono_from({a: exp}, ())
        return Expr({m: Fraction(sign)})

    @staticmethod
    def from_terms(pairs) -> "Expr":
        out: dict = {}
        for m, c in pairs:
            if c:
                v = out.get(m, 0) + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Expr(out)

    # arithmetic
    def __add__(self, other) -> "Expr":
        if not isinstance(other, _SCALARS):
            return NotImplemented
        other = as_expr(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                del out[m]
        return Expr(out)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Expr":
        if not isinstance(other, _SCALARS):
            return NotImplemented
        return self + (-as_expr(other))

    def __rsub__(self, other) -> "Expr":
        return as_expr(other) - self

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return Expr({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, _SCALARS):
            return NotImplemented
        other = as_expr(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, m = mono_mul(m1, m2)
                if not sign:
                    continue
                v = out.get(m, 0) + (c1 * c2 if sign > 0 else -c1 * c2)
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Expr(out)

    def __rmul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            return self * other
        return as_expr(other) * self

    def inverse(self) -> "Expr":
        """Inverse of a single even monomial term."""
        if len(self.terms) != 1:
            raise ZeroDivisionError(f"cannot invert non-monomial {self}")
        (m, c), = self.terms.items()
        if any(a.kind >= ODD for a, _ in m):
            raise ZeroDivisionError(f"cannot invert odd monomial {self}")
        sign, mi = mono_from({a: -e for a, e in m}, ())
        return Expr({mi: sign / c})

    def __truediv__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * as_expr(other).inverse()

    def __rtruediv__(self, other) -> "Expr":
        return as_expr(other) * self.inverse()

    def __pow__(self, n: int) -> "Expr":
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparison / hashing
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    # inspection
    def atoms(self) -> set:
        return {a for m in self.terms for a, _ in m}

    def is_const(self) -> bool:
        return all(m == ONE_MONO for m in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get(ONE_MONO, Fraction(0))

    def odd_degrees(self) -> set:
        return {sum(1 for a, _ in m if a.kind >= ODD) for m in self.terms}

    def map_coeffs(self, f) -> "Expr":
        return Expr.from_terms((m, f(c)) for m, c in self.terms.items())

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda mc: term_key(mc[0]))

    def __str__(self) -> str:
        from .parse import to_text

        return to_text(self)

    def __repr__(self) -> str:
        return f"Expr({self})"


def term_key(m: Monomial):
    """Graded lexicographic key: total derivative order, then atoms, then exponents."""
    return (
        sum(a.order * abs(e) for a, e in m),
        sum(abs(e) for _, e in m),
        tuple((a.kind, a.name, a.order, -e) for a, e in m),
    )


ZERO = Expr()
_SCALARS = (Expr, int, Fraction, Atom)
ONE = Expr.const(1)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Expr.const(x)
    if isinstance(x, Atom):
        return Expr.atom(x)
    raise TypeError(f"cannot interpret {x!r} as Expr")


def split_factor(m: Monomial, atom: Atom) -> tuple[int, int, Monomial]:
    """Write ``m = sign * atom**e * rest`` with the atom pulled to the front.

    Returns ``(sign, e, rest)``; ``e == 0`` when the atom is absent.
    """
    pos = 0
    for i, (a, e) in enumerate(m):
        if a == atom:
            rest = m[:i] + m[i + 1:]
            if a.kind >= ODD:
                return (-1 if pos % 2 else 1), 1, rest
            return 1, e, rest
        if a.kind >= ODD:
            pos += 1
    return 1, 0, m


def diff_atom(E: Expr, atom: Atom) -> Expr:
    """Partial derivative (left derivative for odd atoms)."""
    out: dict = {}
    for m, c in E.terms.items():
        sign, e, rest = split_factor(m, atom)
        if not e:
            continue
        if e == 1:
            nm = rest
            s2 = 1
        else:
            odd = [a for a, _ in rest if a.kind >= ODD]
            even = {a: x for a, x in rest if a.kind < ODD}
            even[atom] = e - 1
            s2, nm = mono_from(even, odd)
        v = out.get(nm, 0) + c * e * sign * s2
        if v:
            out[nm] = v
        else:
            out.pop(nm, None)
    return Expr(out)


def collect(E: Expr, atoms: Iterable[Atom]) -> dict:
    """Group terms by the exponents of the given even atoms.

    Returns ``{exponent tuple: coefficient Expr}``.
    """
    atoms = list(atoms)
    groups: dict = {}
    for m, c in E.terms.items():
        d = dict(m)
        key = tuple(d.get(a, 0) for a in atoms)
        rest = tuple((a, e) for a, e in m if a not in atoms)
        groups.setdefault(key, {})[rest] = c
    return {k: Expr(v) for k, v in sorted(groups.items())}
