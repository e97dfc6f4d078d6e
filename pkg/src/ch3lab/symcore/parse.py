"""Text form of expressions.

Grammar (one expression per line in fixture files)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/' | '^^') unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := INT | NAME | NAME '_' ('x'+ | 'y'+) | 'D(' expr ',' VAR [',' INT] ')' | '(' expr ')'

``^^`` is the wedge of odd factors; it multiplies in order, like ``*``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .expr import ODD, ONE_MONO, Expr

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\^\^|[-+*/^(),]))")


class ParseError(ValueError):
    def __init__(self, msg: str, offset: int):
        super().__init__(f"{msg} at byte {offset}")
        self.offset = offset


def split_jet(token: str, jet) -> tuple[str, int]:
    if jet.has(token):
        return token, 0
    if "_" in token:
        base, _, suf = token.rpartition("_")
        if suf and set(suf) == {jet.var} and jet.has(base):
            return base, len(suf)
    from .jet import SymbolError

    raise SymbolError(f"unknown symbol {token!r}")


def _tokenize(text: str):
    pos = 0
    toks = []
    data = text.encode()
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}",
                             len(text[:pos].encode()) + (len(text[pos:]) - len(text[pos:].lstrip())))
        start = m.start(m.lastindex)
        kind = ("int", "name", "op")[m.lastindex - 1]
        toks.append((kind, m.group(m.lastindex), len(text[:start].encode())))
        pos = m.end()
    toks.append(("end", "", len(data)))
    return toks


class _Parser:
    def __init__(self, text: str, jet):
        self.toks = _tokenize(text)
        self.i = 0
        self.jet = jet

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def expr(self) -> Expr:
        out = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Expr:
        out = self.unary()
        while self.peek()[1] in ("*", "/", "^^"):
            _, op, off = self.take()
            rhs = self.unary()
            if op == "/":
                try:
                    out = out / rhs
                except ZeroDivisionError as exc:
                    raise ParseError(str(exc), off) from None
            else:
                out = out * rhs
        return out

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            _, _, off = self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, val, off2 = self.take()
            if kind != "int":
                raise ParseError("exponent must be an integer", off2)
            try:
                return base ** (sign * int(val))
            except ZeroDivisionError as exc:
                raise ParseError(str(exc), off) from None
        return base

    def atom(self) -> Expr:
        kind, val, off = self.take()
        if kind == "int":
            return Expr.const(Fraction(int(val)))
        if val == "(":
            e = self.expr()
            self.take(")")
            return e
        if kind == "name":
            if val == "D" and self.peek()[1] == "(":
                self.take("(")
                e = self.expr()
                self.take(",")
                _, var, voff = self.take()
                if var != self.jet.var:
                    raise ParseError(f"derivative variable {var!r} is not {self.jet.var!r}", voff)
                n = 1
                if self.peek()[1] == ",":
                    self.take()
                    k2, nv, noff = self.take()
                    if k2 != "int":
                        raise ParseError("derivative order must be an integer", noff)
                    n = int(nv)
                self.take(")")
                return self.jet.D(e, n)
            from .jet import SymbolError

            try:
                name, order = split_jet(val, self.jet)
            except SymbolError:
                raise SymbolError(f"unknown symbol {val!r} at byte {off}") from None
            if order and name in self.jet.gens:
                return self.jet.D(self.jet.sym(name), order)
            return self.jet.sym(name, order)
        raise ParseError(f"unexpected token {val or 'end of input'!r}", off)


def parse(text: str, jet) -> Expr:
    p = _Parser(text, jet)
    out = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
    return out


def _coeff_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def mono_text(m) -> str:
    even = []
    odd = []
    for a, e in m:
        if a.kind >= ODD:
            odd.append(str(a))
        elif e == 1:
            even.append(str(a))
        else:
            even.append(f"{a}^{e}")
    s = "*".join(even)
    if odd:
        s = (s + "*" if s else "") + "^^".join(odd)
    return s


def to_text(E: Expr) -> str:
    if not E.terms:
        return "0"
    parts = []
    for m, c in E.sorted_terms():
        mag = abs(c)
        body = mono_text(m)
        if m == ONE_MONO:
            t = _coeff_text(mag)
        elif mag == 1:
            t = body
        else:
            t = f"{_coeff_text(mag)}*{body}"
        if not parts:
            parts.append(("-" if c < 0 else "") + t)
        else:
            parts.append((" - " if c < 0 else " + ") + t)
    return "".join(parts)
