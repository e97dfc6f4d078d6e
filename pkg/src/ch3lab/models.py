"""Registry of the concrete models: fields, Lax pairs, operators, functionals.

Bundles are built once and cached; callers must treat them as read-only.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType

from .opalg import Functional, LinOp, MatrixOp, column, op_text
from .symcore import Expr, JetSpace, RewriteSystem, rule
from .symcore.parse import to_text

MODEL_SCHEMA = "ch3lab.model/1"

THETAS = ("theta1", "theta2", "theta3")
PENCIL = ("alpha", "beta")
_F32 = Fraction(3, 2)


class UnknownModel(KeyError):
    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class ModelBundle:
    name: str
    jet: JetSpace = field(repr=False)
    variables: tuple
    definitions: MappingProxyType
    evolution: MappingProxyType
    lax_x: tuple = ()
    lax_t: tuple = ()
    operators: MappingProxyType = MappingProxyType({})
    operator_order: tuple = ()
    functionals: MappingProxyType = MappingProxyType({})
    constraints: RewriteSystem | None = None
    extras: MappingProxyType = MappingProxyType({})
    checks: tuple = ()
    notes: tuple = ()
    parent: str = ""

    def symbols(self) -> set:
        """Every base name appearing in any expression of the bundle."""
        seen: set = set()

        def walk(E):
            if isinstance(E, Expr):
                seen.update(a.name for a in E.atoms())
            elif isinstance(E, (list, tuple)):
                for x in E:
                    walk(x)
            elif isinstance(E, (dict, MappingProxyType)):
                for x in E.values():
                    walk(x)
            elif isinstance(E, LinOp):
                for c in E.local.values():
                    walk(c)
                for t in E.nonlocal_.values():
                    for (mL, _, mR) in t:
                        seen.update(a.name for a, _ in mL)
                        seen.update(a.name for a, _ in mR)
            elif isinstance(E, MatrixOp):
                for r in E.rows:
                    walk(r)
            elif isinstance(E, Functional):
                walk(E.density)

        for part in (self.definitions, self.evolution, self.lax_x, self.lax_t, self.operators,
                     self.functionals, self.extras):
            walk(part)
        if self.constraints:
            for n, _, rhs in self.constraints.rules:
                seen.add(n)
                walk(rhs)
        return seen

    def orphans(self) -> set:
        return {n for n in self.symbols() if not self.jet.has(n)}


def _mat(jet: JetSpace, rows) -> tuple:
    return tuple(tuple(jet.parse(c) if isinstance(c, str) else c for c in r) for r in rows)


def _exprs(jet: JetSpace, d: dict) -> MappingProxyType:
    return MappingProxyType({k: jet.parse(v) if isinstance(v, str) else v for k, v in d.items()})


def _sandwich(jet, left: str, right: str, scale=1) -> LinOp:
    """``scale * left o Inv(d) o right``."""
    inv = LinOp.inv(jet, [0, 1])
    return LinOp.mul(jet, left).compose(inv).compose(LinOp.mul(jet, right)).scale(scale)


def _op(jet, terms) -> LinOp:
    """Sum of ``coeff o d^k`` from ``[(coeff text, k)]``."""
    out = LinOp(jet)
    for c, k in terms:
        out = out + LinOp.mul(jet, c).compose(LinOp.d(jet, k))
    return out


def _dcoef(jet, c: str) -> LinOp:
    """``d o c``."""
    return LinOp.d(jet).compose(LinOp.mul(jet, c))


# three-component system on the line x

CH3_DEFS = {
    "u": "p - p_xx",
    "v": "1/2*(q_xx - 4*q + p_xx*r_x - r_xx*p_x + 3*p_x*r - 3*p*r_x)",
    "w": "r_xx - r",
}
CH3_EVOL = {
    "u": "-v*p_x + u_x*q + 3/2*u*q_x - 3/2*u*(p_x*r_x - p*r)",
    "v": "2*v*q_x + v_x*q",
    "w": "v*r_x + w_x*q + 3/2*w*q_x + 3/2*w*(p_x*r_x - p*r)",
}
CH3_U = [["0", "1", "0"], ["1 + lam*v", "0", "u"], ["lam*w", "0", "0"]]
CH3_V = [
    ["-1/2*(q_x + p_x*r_x - p*r)", "1/lam + q", "p_x/lam"],
    ["1/lam - p*r_x + p_x*r - q + lam*q*v", "1/2*(q_x - p_x*r_x + p*r)", "p/lam + q*u"],
    ["-r + lam*q*w", "r_x", "p_x*r_x - p*r"],
]
H0_DENSITY = "v + u*r_x"
H1_DENSITY = "1/4*(4*q^2 - q*q_xx - p_x^2*r_x^2 + 6*p*p_x*r*r_x + 3*p^2*r^2)"

# s^4 = v; the s flow follows from the v equation
S_EVOL = "1/2*s*q_x + s_x*q"

# fields on the y side, pulled back in s-form
PULLBACK = {
    "Q1": "s_y/s + s^-2",
    "Q2": "u*s^-3",
    "Q3": "w*s^-3",
    "a": "p*s",
    "b": "r*s",
    "c": "q_y - 2*q*s^-2",
}
# the same objects written with fractional powers of v, for display only
RADICAL_FORMS = {
    "Q1": "v_y/(4*v) + v^(-1/2)",
    "Q2": "u*v^(-3/4)",
    "Q3": "w*v^(-3/4)",
    "a": "p*v^(1/4)",
    "b": "r*v^(1/4)",
    "c": "q_y - 2*q*v^(-1/2)",
}
POTENTIAL_V = "3*v_y^2/(16*v^2) - v_yy/(4*v) - 1/v"


def ch3_jet() -> JetSpace:
    return JetSpace("x", ["p", "q", "r", "u", "v", "w", "s"], THETAS, PENCIL)


def ch3_operators(jet: JetSpace) -> dict:
    d = LinOp.d(jet)
    A = LinOp.d(jet, 2) - LinOp.mul(jet, 1)
    v = LinOp.mul(jet, "v")
    order = ("u", "w", "v")
    J1 = MatrixOp.from_rows(jet, [[0, A, 0], [-A, 0, 0], [0, 0, -(d * v) - v * d]], order)
    M = MatrixOp.from_rows(jet, [
        [_sandwich(jet, "u", "u", _F32), LinOp.mul(jet, "-v") - _sandwich(jet, "u", "w", _F32), 0],
        [LinOp.mul(jet, "v") - _sandwich(jet, "w", "u", _F32), _sandwich(jet, "w", "w", _F32), 0],
        [0, 0, 0],
    ], order)
    N = column(jet, [
        _op(jet, [("3/2*u", 1), ("u_x", 0)]),
        _op(jet, [("3/2*w", 1), ("w_x", 0)]),
        _op(jet, [("v", 1)]) + _dcoef(jet, "v"),
    ])
    inv3 = MatrixOp.from_rows(jet, [[LinOp.inv(jet, [0, -4, 0, 1])]])
    # twice the nonlocal block: this normalization makes J2 grad H0 reproduce the flow
    NN = (N @ inv3 @ N.adjoint()).scale(2)
    J2 = MatrixOp((M - NN).rows, jet, order)
    return {"J1": J1, "J2": J2, "M": M, "N": N}


def _build_ch3() -> ModelBundle:
    jet = ch3_jet()
    ops = ch3_operators(jet)
    defs = _exprs(jet, CH3_DEFS)
    H0 = jet.substitute(jet.parse(H0_DENSITY), dict(defs))
    H1 = jet.parse(H1_DENSITY)
    return ModelBundle(
        name="ch3",
        jet=jet,
        variables=("u", "v", "w"),
        definitions=defs,
        evolution=_exprs(jet, CH3_EVOL),
        lax_x=_mat(jet, CH3_U),
        lax_t=_mat(jet, CH3_V),
        operators=MappingProxyType({"J1": ops["J1"], "J2": ops["J2"]}),
        operator_order=("u", "w", "v"),
        functionals=MappingProxyType({
            "H0": Functional(H0, ("p", "q", "r")),
            "H1": Functional(H1, ("p", "q", "r")),
        }),
        extras=MappingProxyType({
            "M": ops["M"],
            "N": ops["N"],
            "s_evolution": jet.parse(S_EVOL),
            "root_power": 4,
            "conservation": (jet.parse("s^2"), jet.parse("s^2*q")),
            "reciprocal": "dy = s^2 dx + s^2 q dt, dtau = dt",
            "gauge": "psi1 = s^-1 phi1",
        }),
        checks=("zero-curvature", "conservation", "reciprocal-derivation", "skew"),
        notes=("H0 and H1 are densities in (p, q, r); gradients in (u, w, v) go through module numeric",),
    )


def reciprocal_jet() -> JetSpace:
    """The y side of the transformation, for the elimination identities."""
    return JetSpace("y", ["s", "p", "q", "r", "u", "w", "phi1", "psi3", "phi3",
                          "Q1", "Q2", "Q3"], (), ())


# transformed system on the line y

MK_GENS = [
    ("g", "2*Q1*g - 2", False, True),
    ("k", "a*Q3 + b*Q2", False, False),
    ("f", "Q3*(a_y - a*Q1)*g - Q2*(b_y - b*Q1)*g + a*Q3 - b*Q2", False, False),
    ("e", "Q2*theta2 - Q3*theta3", True, False),
    ("h", "1/2*theta1_yy + Q1*theta1_y + 3/2*Q2*theta2_y + 1/2*Q2_y*theta2"
          " + 3/2*Q3*theta3_y + 1/2*Q3_y*theta3", True, False),
]
MK_X = [["Q1", "mu", "0"], ["mu", "-Q1", "Q2"], ["mu*Q3", "0", "0"]]
MK_T = [
    ["mu^-2 - 1/2*f", "g/mu", "((a_y - a*Q1)*g + a)/mu"],
    ["(c - k/g)/mu", "-mu^-2 - 1/2*f", "(a*Q1 - a_y)/mu^2"],
    ["(b_y - b*Q1)/mu", "(b_y - b*Q1)*g + b", "f"],
]
MK_EVOL = {
    "Q1": "1/2*D(c*g, y)",
    "Q2": "-3/2*Q2*f - (a_y - a*Q1)*g - a",
    "Q3": "3/2*Q3*f + (b_y - b*Q1)*g + b",
}
MK_F = {
    "F1": "a_yy - a*(Q1_y + Q1^2) + Q2",
    "F2": "Q3 - b_yy + b*(Q1_y + Q1^2)",
    "F3": "Q2*(b_y - b*Q1) + Q3*(a_y - a*Q1) + (a*Q3 + b*Q2)/g + 2*k/g^2 - c_y - 2*Q1*c + 2",
}
# F = 0 solved for its leading jet, in the order F1, F2, F3
MK_F_LEAD = (("F1", "a_yy", 1), ("F2", "b_yy", -1), ("F3", "c_y", -1))
MK_ABC = {"A": "-c*g", "B": "(b_y - b*Q1)*g + b", "C": "(a_y - a*Q1)*g + a"}
MK_CHAR = (
    "-1/2*alpha*theta1_y + 1/4*beta*h_yy - 1/2*beta*D(Q1*h, y)",
    "3/2*alpha*Q2*e - alpha*theta3 + beta*theta3_yy - beta*(Q1_y + Q1^2)*theta3"
    " - 3/4*beta*Q2*h_y - 1/2*beta*Q2_y*h",
    "-3/2*alpha*Q3*e + alpha*theta2 - beta*theta2_yy + beta*(Q1_y + Q1^2)*theta2"
    " - 3/4*beta*Q3*h_y - 1/2*beta*Q3_y*h",
)
MK_THETA = (
    "3/4*alpha*(Q2*theta2 - Q3*theta3)^^e - 1/4*alpha*theta1^^theta1_y - alpha*theta2^^theta3"
    " - beta*(Q1_y + Q1^2)*theta2^^theta3 + beta*theta2^^theta3_yy"
    " + 1/4*beta*(1/2*theta1_yy + Q1*theta1_y + 3/2*Q2*theta2_y + 1/2*Q2_y*theta2"
    " + 3/2*Q3*theta3_y + 1/2*Q3_y*theta3)^^h"
)


def mkdv3_jet() -> JetSpace:
    jet = JetSpace("y", ["Q1", "Q2", "Q3", "a", "b", "c"], THETAS, PENCIL)
    for name, rhs, odd, inv in MK_GENS:
        jet.declare(name, rhs, odd=odd, inverse_allowed=inv)
    return jet


def f_rules(jet: JetSpace, F: dict) -> RewriteSystem:
    rules = []
    for name, lead, sign in MK_F_LEAD:
        lhs = jet.parse(lead)
        rules.append(rule(jet, lead, lhs - F[name] * sign))
    return RewriteSystem(rules, "constraint-reduction")


def mkdv3_operators(jet: JetSpace) -> dict:
    d = LinOp.d(jet)
    q1 = LinOp.mul(jet, "Q1")
    K1 = MatrixOp.from_rows(jet, [
        [d.scale(Fraction(-1, 2)), 0, 0],
        [0, _sandwich(jet, "Q2", "Q2", _F32), LinOp.mul(jet, -1) - _sandwich(jet, "Q2", "Q3", _F32)],
        [0, LinOp.mul(jet, 1) - _sandwich(jet, "Q3", "Q2", _F32), _sandwich(jet, "Q3", "Q3", _F32)],
    ], ("Q1", "Q2", "Q3"))
    fac = (d + q1).compose(d - q1)
    F = column(jet, [
        d.compose(d - q1.scale(2)).scale(Fraction(-1, 2)),
        _op(jet, [("1/2*Q2", 1)]) + _dcoef(jet, "Q2"),
        _op(jet, [("1/2*Q3", 1)]) + _dcoef(jet, "Q3"),
    ])
    inv = MatrixOp.from_rows(jet, [[LinOp.inv(jet, [0, 1])]])
    K2 = MatrixOp.from_rows(jet, [[0, 0, 0], [0, 0, fac], [0, -fac, 0]], ("Q1", "Q2", "Q3"))
    K2 = K2 + (F @ inv @ F.adjoint()).scale(Fraction(1, 2))
    return {"K1": MatrixOp(K1.rows, jet, ("Q1", "Q2", "Q3")),
            "K2": MatrixOp(K2.rows, jet, ("Q1", "Q2", "Q3")), "F": F}


def _build_mkdv3() -> ModelBundle:
    jet = mkdv3_jet()
    F = _exprs(jet, MK_F)
    # X = (d g - g d / 2) F3 + Q3 g F1 - Q2 g F2; its antiderivative houses the G-vector
    g = jet.sym("g")
    X = jet.D(g * F["F3"]) - g * jet.D(F["F3"]) * Fraction(1, 2) \
        + jet.sym("Q3") * g * F["F1"] - jet.sym("Q2") * g * F["F2"]
    jet.declare("Xi", X)
    Xi = jet.sym("Xi")
    G = (
        (jet.D(Xi, 2) - jet.D(jet.sym("Q1") * Xi) * 2) * Fraction(1, 4),
        jet.D(g) * F["F1"] * _F32 + g * jet.D(F["F1"])
        - (jet.sym("Q2") * jet.D(Xi) * _F32 + jet.sym("Q2", 1) * Xi) * Fraction(1, 2),
        jet.D(g) * F["F2"] * _F32 + g * jet.D(F["F2"])
        - (jet.sym("Q3") * jet.D(Xi) * _F32 + jet.sym("Q3", 1) * Xi) * Fraction(1, 2),
    )
    ops = mkdv3_operators(jet)
    return ModelBundle(
        name="mkdv3",
        jet=jet,
        variables=("Q1", "Q2", "Q3"),
        definitions=MappingProxyType({}),
        evolution=_exprs(jet, MK_EVOL),
        lax_x=_mat(jet, MK_X),
        lax_t=_mat(jet, MK_T),
        operators=MappingProxyType({"K1": ops["K1"], "K2": ops["K2"]}),
        operator_order=("Q1", "Q2", "Q3"),
        constraints=f_rules(jet, F),
        extras=MappingProxyType({
            "F": F,
            "ABC": tuple(jet.parse(MK_ABC[k]) for k in "ABC"),
            "G": G,
            "Fcol": ops["F"],
            "characteristic": tuple(jet.parse(t) for t in MK_CHAR),
            "Theta": jet.parse(MK_THETA),
            "pullback": MappingProxyType(dict(PULLBACK)),
            "radical_forms": MappingProxyType(dict(RADICAL_FORMS)),
            "generators": ("g", "k", "f", "e", "h", "Xi"),
        }),
        checks=("transformed-zc", "negative-flow", "skew", "jacobi", "compatibility"),
        notes=("time variable tau; spectral parameter mu with mu^2 = lam",
               "Xi is the antiderivative of (d g - g d/2) F3 + Q3 g F1 - Q2 g F2"),
    )


# generalized KdV-type potentials (u1, v1, w1)

KDV_X = [["0", "1", "0"], ["lam + v1", "0", "u1"], ["lam*w1", "0", "0"]]
RELA1 = {"u1": "Q2", "v1": "Q1_y + Q1^2", "w1": "Q3"}


def kdv3_operators(jet: JetSpace) -> dict:
    d = LinOp.d(jet)
    v1 = LinOp.mul(jet, "v1")
    order = ("u1", "v1", "w1")
    mid = LinOp.d(jet, 3).scale(Fraction(-1, 2)) + d * v1 + v1 * d
    E1 = MatrixOp.from_rows(jet, [
        [_sandwich(jet, "u1", "u1", -_F32), 0, _sandwich(jet, "u1", "w1", _F32) + LinOp.mul(jet, 1)],
        [0, mid, 0],
        [_sandwich(jet, "w1", "u1", _F32) - LinOp.mul(jet, 1), 0, _sandwich(jet, "w1", "w1", -_F32)],
    ], order)
    B = LinOp.d(jet, 2) - v1
    Gc = column(jet, [
        _op(jet, [("1/2*u1", 1)]) + _dcoef(jet, "u1"),
        mid,
        _op(jet, [("1/2*w1", 1)]) + _dcoef(jet, "w1"),
    ])
    inv = MatrixOp.from_rows(jet, [[LinOp.inv(jet, [0, 1])]])
    E2 = MatrixOp.from_rows(jet, [[0, 0, B], [0, 0, 0], [-B, 0, 0]], order)
    E2 = E2 + (Gc @ inv @ Gc.adjoint()).scale(Fraction(1, 2))
    return {"E1": E1, "E2": MatrixOp(E2.rows, jet, order)}


def _build_kdv3() -> ModelBundle:
    jet = JetSpace("y", ["u1", "v1", "w1", "Q1", "Q2", "Q3"], THETAS, PENCIL)
    ops = kdv3_operators(jet)
    return ModelBundle(
        name="kdv3",
        jet=jet,
        variables=("u1", "v1", "w1"),
        definitions=_exprs(jet, RELA1),
        evolution=MappingProxyType({}),
        lax_x=_mat(jet, KDV_X),
        operators=MappingProxyType(ops),
        operator_order=("u1", "v1", "w1"),
        extras=MappingProxyType({"source_variables": ("Q1", "Q2", "Q3"),
                                 "source_model": "mkdv3",
                                 "pairs": (("E1", "K1"), ("E2", "K2"))}),
        checks=("miura", "skew"),
        notes=("bare w in the third E2 entry read as w1",),
    )


# reductions of ch3

NOVIKOV_T = [
    ["p*p_x + 1/(3*lam)", "-p^2", "p/lam"],
    ["p_x^2", "-p*p_x + 1/(3*lam)", "-p^3 + p^2*p_xx + p_x/lam"],
    ["lam*(p_xx - p)*p^2 - p_x", "p", "-2/(3*lam)"],
]
NOVIKOV_EVOL = "-(p^2*u_x + 3*p*p_x*u)"

REDUCTIONS = {
    "ch": {"u": "0", "w": "0"},
    "gx": {"v": "0"},
    "novikov": {"u": "w", "v": "0"},
}


def _canon_constraint(c: dict) -> tuple:
    return tuple(sorted((k, str(v).replace(" ", "")) for k, v in c.items()))


def _v_rule(jet) -> RewriteSystem:
    """v = 0 solved for q_xx."""
    vdef = jet.parse(CH3_DEFS["v"])
    return RewriteSystem([rule(jet, "q_xx", jet.parse("q_xx") - vdef * 2)])


def reduce_model(base: ModelBundle, constraint: dict) -> ModelBundle:
    """Restrict ``ch3`` to one of the three admissible constraints."""
    if base.name != "ch3":
        raise ValueError(f"reductions are defined for ch3 only, not {base.name!r}")
    key = _canon_constraint(constraint)
    names = {_canon_constraint(v): k for k, v in REDUCTIONS.items()}
    if key not in names:
        raise ValueError(f"constraint {dict(constraint)} is not one of "
                         f"{[dict(v) for v in REDUCTIONS.values()]}")
    jet = base.jet
    which = names[key]
    J1, J2 = base.operators["J1"], base.operators["J2"]
    notes = []
    if which == "ch":
        # u = w = 0 on a periodic line forces p = r = 0
        b = {"p": 0, "r": 0, "u": 0, "w": 0}
        sub = lambda E: jet.substitute(E, b)
        lax_x = tuple(tuple(sub(c) for c in r) for r in base.lax_x)
        lax_t = tuple(tuple(sub(c) for c in r) for r in base.lax_t)
        ops = {"J1": J1.select([2]).subs(b), "J2": J2.select([2]).subs(b)}
        return ModelBundle(
            name="ch", jet=jet, variables=("v",),
            definitions=MappingProxyType({"v": sub(base.definitions["v"])}),
            evolution=MappingProxyType({"v": base.evolution["v"]}),
            lax_x=lax_x, lax_t=lax_t, operators=MappingProxyType(ops), operator_order=("v",),
            extras=MappingProxyType({"bindings": MappingProxyType(b)}),
            checks=("zero-curvature", "skew"), parent="ch3",
            notes=("u and w equations dropped: identically 0 = 0 on the slice",),
        )
    vr = _v_rule(jet)
    if which == "gx":
        b = {"v": 0}
        sub = lambda E: jet.substitute(E, b)
        ops = {"J1": J1.select([0, 1]).subs(b), "J2": J2.select([0, 1]).subs(b)}
        return ModelBundle(
            name="gx", jet=jet, variables=("u", "w"),
            definitions=MappingProxyType({k: base.definitions[k] for k in ("u", "w")}),
            evolution=MappingProxyType({k: sub(base.evolution[k]) for k in ("u", "w")}),
            lax_x=tuple(tuple(sub(c) for c in r) for r in base.lax_x),
            lax_t=tuple(tuple(sub(c) for c in r) for r in base.lax_t),
            operators=MappingProxyType(ops), operator_order=("u", "w"), constraints=vr,
            extras=MappingProxyType({"bindings": MappingProxyType(b)}),
            checks=("zero-curvature", "skew"), parent="ch3",
            notes=("v equation dropped: v_t = 0 holds identically at v = 0",
                   "q is tied to (p, r) through the rule for q_xx"),
        )
    # novikov: u = w with v = 0; w = u means r = -p
    b = {"v": 0, "r": jet.parse("-p"), "w": jet.parse("u")}
    sub = lambda E: jet.substitute(E, b)
    merge = MatrixOp.from_rows(jet, [[1, 1, 0]])
    red = lambda J: MatrixOp((merge @ J @ merge.adjoint()).subs(b).rows, jet, ("u",))
    inherited = (sub(base.evolution["u"]), sub(base.evolution["w"]))
    notes.append("the three-component time part does not preserve u = w: "
                 "u_t - w_t = " + to_text(inherited[0] - inherited[1]))
    notes.append("time part taken from the Novikov flow in the gauge of the reduced spectral problem")
    notes.append("operators merged by [1, 1] o J o [1, 1]^T; J1 collapses to 0")
    return ModelBundle(
        name="novikov", jet=jet, variables=("u",),
        definitions=MappingProxyType({"u": base.definitions["u"]}),
        evolution=MappingProxyType({"u": jet.parse(NOVIKOV_EVOL)}),
        lax_x=tuple(tuple(sub(c) for c in r) for r in base.lax_x),
        lax_t=_mat(jet, NOVIKOV_T),
        operators=MappingProxyType({"J1": red(J1), "J2": red(J2)}), operator_order=("u",),
        extras=MappingProxyType({"bindings": MappingProxyType(b),
                                 "inherited_evolution": inherited}),
        checks=("zero-curvature", "skew"), parent="ch3", notes=tuple(notes),
    )


_BUILDERS = {
    "ch3": _build_ch3,
    "mkdv3": _build_mkdv3,
    "kdv3": _build_kdv3,
    "ch": lambda: reduce_model(get_model("ch3"), REDUCTIONS["ch"]),
    "gx": lambda: reduce_model(get_model("ch3"), REDUCTIONS["gx"]),
    "novikov": lambda: reduce_model(get_model("ch3"), REDUCTIONS["novikov"]),
}


def model_names() -> list[str]:
    return list(_BUILDERS)


@lru_cache(maxsize=None)
def get_model(name: str) -> ModelBundle:
    if name not in _BUILDERS:
        raise UnknownModel(f"unknown model {name!r}; registered: {', '.join(_BUILDERS)}")
    return _BUILDERS[name]()


def list_models() -> list[dict]:
    out = []
    for n in _BUILDERS:
        m = get_model(n)
        out.append({"name": n, "variables": len(m.variables), "checks": list(m.checks)})
    return out


def _mat_text(M) -> list:
    return [[to_text(c) for c in r] for r in M]


def bundle_to_dict(m: ModelBundle) -> dict:
    return {
        "schema": MODEL_SCHEMA,
        "name": m.name,
        "parent": m.parent,
        "spatial_variable": m.jet.var,
        "variables": list(m.variables),
        "operator_order": list(m.operator_order),
        "generators": {g.name: {"odd": g.odd, "inverse_allowed": g.inverse_allowed,
                                "derivative": to_text(g.rule) if g.rule is not None else None}
                       for g in m.jet.gens.values()},
        "definitions": {k: to_text(v) for k, v in m.definitions.items()},
        "evolution": {k: to_text(v) for k, v in m.evolution.items()},
        "lax_x": _mat_text(m.lax_x),
        "lax_t": _mat_text(m.lax_t),
        "operators": {k: [[op_text(a) for a in r] for r in M.rows] for k, M in m.operators.items()},
        "functionals": {k: to_text(F.density) for k, F in m.functionals.items()},
        "constraints": [[n, o, to_text(r)] for n, o, r in m.constraints.rules] if m.constraints else [],
        "checks": list(m.checks),
        "notes": list(m.notes),
    }


def bundle_to_json(m: ModelBundle) -> str:
    return json.dumps(bundle_to_dict(m), indent=2, sort_keys=True) + "\n"


__all__ = [
    "ModelBundle", "UnknownModel", "bundle_to_dict", "bundle_to_json", "get_model",
    "list_models", "model_names", "reduce_model", "reciprocal_jet",
]
