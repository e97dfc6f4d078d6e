"""Exact differential algebra on jet space with nonlocal generators."""
from .expr import GEN, ODD, ODDGEN, ONE, PARAM, VAR, ZERO, Atom, Expr, as_expr, collect, diff_atom
from .jet import (
    Generator,
    JetSpace,
    RewriteBudgetExceeded,
    RewriteSystem,
    SymbolError,
    UnresolvedTimeDerivative,
    reduce_modulo,
    rule,
)
from .parse import ParseError, parse, to_text


def total_derivative(E: Expr, jet: JetSpace, var: str | None = None) -> Expr:
    if var is not None and var != jet.var:
        raise SymbolError(f"{var!r} is not the spatial variable {jet.var!r}")
    return jet.D(E)


def substitute(E: Expr, bindings, jet: JetSpace, rewrite: RewriteSystem | None = None) -> Expr:
    return jet.substitute(E, bindings, protected=rewrite.targets() if rewrite else ())


__all__ = [
    "Atom", "Expr", "Generator", "JetSpace", "ParseError", "RewriteBudgetExceeded",
    "RewriteSystem", "SymbolError", "UnresolvedTimeDerivative", "as_expr", "collect",
    "diff_atom", "parse", "reduce_modulo", "rule", "substitute", "to_text",
    "total_derivative", "GEN", "ODD", "ODDGEN", "ONE", "PARAM", "VAR", "ZERO",
]
