"""Symbolic verification procedures and the suite runner.

Every check returns a :class:`CheckReport`.  Symbolic checks pass only on an
exact zero; the residual text is the printed normal form otherwise.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .models import (POTENTIAL_V, PULLBACK, RELA1, ModelBundle, get_model, reciprocal_jet,
                     f_rules)
from .multivec import (FunctionalForm, characteristic, compatibility_check, jacobi_check,
                       pencil, scalar_op, scalar_space, wedge_normalize)
from .opalg import MatrixOp, is_skew_adjoint, miura_conjugate
from .report import CheckReport
from .symcore import Expr, JetSpace, RewriteSystem, UnresolvedTimeDerivative, reduce_modulo
from .symcore.expr import PARAM, collect
from .symcore.integrate import UnresolvedNonlocal
from .symcore.parse import to_text

KINDS = ("zero-curvature", "conservation", "reciprocal-derivation", "transformed-zc",
         "negative-flow", "reduction", "skew", "jacobi", "compatibility", "miura", "numeric")


@dataclass(frozen=True)
class CheckSpec:
    id: str
    model: str
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown check kind {self.kind!r}; expected one of {', '.join(KINDS)}")


def _report(id_, model, ok, residual, anchor, t0, details=None) -> CheckReport:
    return CheckReport(id_, model, "pass" if ok else "fail", "0" if ok else residual, anchor,
                       time.perf_counter() - t0, details or {})


# matrix helpers

def _mm(A, B) -> list:
    n, m, k = len(A), len(B), len(B[0])
    return [[sum((A[i][l] * B[l][j] for l in range(m)), Expr()) for j in range(k)]
            for i in range(n)]


def _graded(E: Expr, jet: JetSpace) -> dict:
    """Split by powers of lam and mu; odd mu powers land in their own grade."""
    atoms = [jet.atom(p) for p in ("lam", "mu") if any(a.name == p for a in E.atoms())]
    if not atoms:
        return {"1": E} if E.terms else {}
    out = {}
    for key, part in collect(E, atoms).items():
        label = "*".join(f"{a.name}^{e}" for a, e in zip(atoms, key) if e) or "1"
        out[label] = part
    return out


def _matrix_residual(Z) -> tuple[bool, str, dict]:
    lines = []
    details = {}
    for i, row in enumerate(Z):
        for j, E in enumerate(row):
            if E.terms:
                lines.append(f"({i + 1},{j + 1}): {to_text(E)}")
                details[f"({i + 1},{j + 1})"] = to_text(E)
    return not lines, "\n".join(lines), details


def zero_curvature_residual(U, V, jet: JetSpace, evolution) -> list:
    """``U_t - V_x + [U, V]`` entrywise, time derivatives through ``evolution``."""
    Ut = [[jet.Dt(c, evolution) for c in r] for r in U]
    UV = _mm(U, V)
    VU = _mm(V, U)
    n = len(U)
    return [[Ut[i][j] - jet.D(V[i][j]) + UV[i][j] - VU[i][j] for j in range(n)] for i in range(n)]


def check_zero_curvature(model: ModelBundle | str, perturb=None, negate: bool = False,
                         id_: str | None = None) -> CheckReport:
    m = get_model(model) if isinstance(model, str) else model
    t0 = time.perf_counter()
    id_ = id_ or f"{m.name}.zero-curvature"
    anchor = "spectral problem and auxiliary problem compatibility"
    jet = m.jet
    V = [list(r) for r in m.lax_t]
    if perturb:
        i, j, text = perturb
        V[i - 1][j - 1] = V[i - 1][j - 1] + jet.parse(text)
    try:
        Z = zero_curvature_residual(m.lax_x, V, jet, m.evolution)
    except UnresolvedTimeDerivative as exc:
        return CheckReport(id_, m.name, "error", str(exc), anchor, time.perf_counter() - t0)
    if negate:
        # V_x - U_t - [U, V], negated back
        Z = [[-(-E) for E in r] for r in Z]
    defs = dict(m.definitions)
    out = []
    for r in Z:
        row = []
        for E in r:
            E = jet.substitute(E, defs)
            if m.constraints:
                E = reduce_modulo(E, m.constraints, jet)
            row.append(E)
        out.append(row)
    ok, text, details = _matrix_residual(out)
    graded = {}
    for i, r in enumerate(out):
        for j, E in enumerate(r):
            for g, part in _graded(E, jet).items():
                graded[f"({i + 1},{j + 1}) {g}"] = to_text(part)
    return _report(id_, m.name, ok, text, anchor, t0, graded)


def check_conservation(model: ModelBundle | str = "ch3", density: str = "s^2", flux: str = "s^2*q",
                       id_: str | None = None) -> CheckReport:
    m = get_model(model) if isinstance(model, str) else model
    t0 = time.perf_counter()
    jet = m.jet
    evol = dict(m.evolution)
    evol["s"] = m.extras["s_evolution"]
    for n in ("p", "q", "r"):
        evol.setdefault(n, None)
    rho, J = jet.parse(density), jet.parse(flux)
    details = {}
    # the s flow is the v flow read through v = s^4
    s4 = jet.parse("s^4")
    lhs = jet.Dt(s4, {"s": evol["s"]})
    rhs = jet.substitute(m.evolution["v"], {"v": s4})
    details["s-flow consistent with v-flow"] = to_text(lhs - rhs)
    evol = {k: v for k, v in evol.items() if v is not None}
    try:
        R = jet.Dt(rho, evol) - jet.D(J)
    except UnresolvedTimeDerivative as exc:
        return CheckReport(id_ or f"{m.name}.conservation", m.name, "error", str(exc),
                           "conservation law for the square root of v", time.perf_counter() - t0)
    ok = R.is_zero() and (lhs - rhs).is_zero()
    return _report(id_ or f"{m.name}.conservation", m.name, ok, to_text(R),
                   "conservation law for the square root of v", t0, details)


def reciprocal_identities(q1: str | None = None) -> dict:
    """Residuals of the three elimination identities on the y side."""
    Y = reciprocal_jet()
    Y.variables.append("v")
    Y._register("v", 1)
    P = lambda t: Y.parse(t)
    s = P("s")
    sub_v = {"v": P("s^4")}
    pot = Y.substitute(P(POTENTIAL_V), sub_v)
    # (i) psi1 = s^-1 phi1, d/dx = s^2 d/dy
    psi1 = P("phi1/s")
    Dx = lambda E: s * s * Y.D(E)
    eq1 = Dx(Dx(psi1)) - P("1 + lam*s^4") * psi1 - P("u*psi3")
    target1 = P("phi1_yy") + pot * P("phi1") - P("lam*phi1") - P("u*s^-3*psi3")
    eq1b = Dx(P("psi3")) - P("lam*w") * psi1
    target1b = P("psi3_y") - P("lam*w*s^-3*phi1")
    r1 = s ** -3 * eq1 - target1
    r1b = s ** -2 * eq1b - target1b
    # (ii) phi2 = (phi1_y - Q1 phi1)/mu from the first row, inserted in the second
    phi2 = (P("phi1_y") - P("Q1*phi1")) * P("mu^-1")
    eq2 = Y.D(phi2) - (P("mu*phi1") - P("Q1") * phi2 + P("Q2*phi3"))
    target2 = P("phi1_yy") - P("(Q1_y + Q1^2 + lam)*phi1") - P("mu*Q2*phi3")
    r2 = P("mu") * eq2 - target2
    # (iii) Q1_y + Q1^2 + potential = 0
    Q1 = P(q1) if q1 else P(PULLBACK["Q1"])
    Q1 = Y.substitute(Q1, sub_v)
    r3 = Y.D(Q1) + Q1 * Q1 + pot
    # (i) and (ii) describe the same phi1 equation once Q2 = u s^-3 and psi3 = mu phi3
    link = Y.substitute(target1, {"psi3": P("mu*phi3")}) - Y.substitute(
        target2, {"Q1": Q1, "Q2": P(PULLBACK["Q2"])})
    return {"gauge": r1 + r1b, "factorization": r2, "potential": r3, "link": link,
            "_pot": pot, "_Q1": Q1, "_jet": Y}


def check_reciprocal_derivation(model: ModelBundle | str = "ch3", q1: str | None = None,
                                id_: str | None = None) -> CheckReport:
    m = get_model(model) if isinstance(model, str) else model
    t0 = time.perf_counter()
    res = reciprocal_identities(q1)
    Y = res["_jet"]
    details = {}
    ok = True
    for key in ("gauge", "factorization", "potential", "link"):
        r = res[key]
        details[key] = "pass" if r.is_zero() else "fail: " + to_text(r)
        ok = ok and r.is_zero()
    # constant slice v = 1
    one = {"s": Expr.const(1)}
    details["slice v=1 potential"] = to_text(Y.substitute(res["_pot"], one))
    details["slice v=1 Q1"] = to_text(Y.substitute(res["_Q1"], one))
    Q1 = res["_Q1"]
    details["slice v=1 Q1_y+Q1^2"] = to_text(Y.substitute(Y.D(Q1) + Q1 * Q1, one))
    text = "; ".join(f"{k}: {v}" for k, v in details.items() if v.startswith("fail"))
    return _report(id_ or f"{m.name}.reciprocal-derivation", m.name, ok, text,
                   "reciprocal transformation, gauge and factorization", t0, details)


def _rules_without(R: RewriteSystem, disable) -> RewriteSystem:
    for name in disable or ():
        R = R.without(name)
    return R


def check_transformed_zero_curvature(model: ModelBundle | str = "mkdv3", disable=(),
                                     bindings: dict | None = None,
                                     id_: str | None = None) -> CheckReport:
    m = get_model(model) if isinstance(model, str) else model
    t0 = time.perf_counter()
    jet = m.jet
    anchor = "transformed Lax pair compatibility modulo the transformed system"
    Z = zero_curvature_residual(m.lax_x, m.lax_t, jet, m.evolution)
    R = _rules_without(m.constraints, [disable] if isinstance(disable, str) else disable)
    if bindings:
        b = {k: jet.parse(v) if isinstance(v, str) else Expr.const(v) for k, v in bindings.items()}
        R = RewriteSystem([(n, o, jet.substitute(r, b)) for n, o, r in R.rules
                           if n not in b], R.kind)
        Z = [[jet.substitute(E, b) for E in r] for r in Z]
    out = [[reduce_modulo(E, R, jet) for E in r] for r in Z]
    ok, text, details = _matrix_residual(out)
    return _report(id_ or f"{m.name}.transformed-zc", m.name, ok, text, anchor, t0, details)


def check_negative_flow(model: ModelBundle | str = "mkdv3", perturb_f1: str | None = None,
                        id_: str | None = None) -> CheckReport:
    m = get_model(model) if isinstance(model, str) else model
    t0 = time.perf_counter()
    jet = m.jet
    anchor = "negative flow with A = -c g, B, C"
    K1, K2 = m.operators["K1"], m.operators["K2"]
    ABC = list(m.extras["ABC"])
    details = {}
    try:
        k1 = K1.apply(ABC)
        k2 = K2.apply(ABC)
    except UnresolvedNonlocal as exc:
        return CheckReport(id_ or f"{m.name}.negative-flow", m.name, "error", str(exc), anchor,
                           time.perf_counter() - t0)
    ok1 = True
    for i, (a, b) in enumerate(zip(k1, (m.evolution[v] for v in m.variables))):
        d = a - b
        details[f"K1 row {i + 1}"] = to_text(d)
        ok1 = ok1 and d.is_zero()
    okG = True
    for i, (a, g) in enumerate(zip(k2, m.extras["G"])):
        d = a - g
        details[f"K2 row {i + 1} - G{i + 1}"] = to_text(d)
        okG = okG and d.is_zero()
    F = dict(m.extras["F"])
    if perturb_f1:
        F["F1"] = F["F1"] + jet.parse(perturb_f1)
    R = f_rules(jet, F)
    xi_rule = reduce_modulo(jet.gens["Xi"].rule, R, jet)
    details["Xi_y modulo F"] = to_text(xi_rule)
    ok2 = True
    for i, a in enumerate(k2):
        r = reduce_modulo(a, R, jet)
        if xi_rule.is_zero():
            # Xi_y vanishes on the constraint set and Xi carries no constant
            r = reduce_modulo(jet.substitute(r, {"Xi": 0}), R, jet)
        details[f"K2 row {i + 1} modulo F"] = to_text(r)
        ok2 = ok2 and r.is_zero()
    ok = ok1 and okG and ok2
    text = "; ".join(f"{k}: {v}" for k, v in details.items() if v != "0" and k != "Xi_y modulo F")
    return _report(id_ or f"{m.name}.negative-flow", m.name, ok, text, anchor, t0, details)


def operator_names(m: ModelBundle) -> list[str]:
    names = sorted(m.operators)
    if {"K1", "K2"} <= set(names):
        names.append("pencil")
    return names


def _operator(m: ModelBundle, name: str | None) -> MatrixOp:
    if name not in operator_names(m):
        raise ValueError(f"model {m.name!r} has operators {', '.join(operator_names(m)) or 'none'};"
                         f" got operator={name!r}")
    if name == "pencil":
        return pencil(m.operators["K1"], m.operators["K2"])
    return m.operators[name]


def _scalar(params) -> tuple[MatrixOp, list]:
    jet = scalar_space(params.get("var", "x"), params.get("field", "v"))
    return scalar_op(jet, [tuple(t) for t in params["scalar"]]), [params.get("field", "v")]


def check_skew(model: ModelBundle | str, operator: str | None = None, scalar=None,
               id_: str | None = None) -> CheckReport:
    m = get_model(model) if isinstance(model, str) else model
    if scalar is not None:
        L, _ = _scalar({"scalar": scalar})
        label = "scalar"
    else:
        L = _operator(m, operator)
        label = operator
    return is_skew_adjoint(L, id_ or f"{m.name}.skew.{label}", m.name, "skew-adjointness")


def check_jacobi(model: ModelBundle | str, operator: str | None = None, scalar=None,
                 id_: str | None = None) -> CheckReport:
    m = get_model(model) if isinstance(model, str) else model
    if scalar is not None:
        L, vars_ = _scalar({"scalar": scalar})
        label = "scalar"
    else:
        L, vars_ = _operator(m, operator), list(m.operator_order)
        label = operator
    rep = jacobi_check(L, vars_, id_ or f"{m.name}.jacobi.{label}", m.name,
                       "prolongation criterion pr v Theta = 0")
    if scalar is None and operator == "pencil" and "characteristic" in m.extras:
        ch = characteristic(L, vars_)
        stored = m.extras["characteristic"]
        same = all((a - b).is_zero() for a, b in zip(ch, stored))
        rep.details["characteristic equals stored L theta"] = "yes" if same else "no"
        th = FunctionalForm(sum((m.jet.sym(f"theta{i + 1}") * c for i, c in enumerate(ch)),
                                Expr()) * Fraction(1, 2), m.jet)
        diff = wedge_normalize(th - FunctionalForm(m.extras["Theta"], m.jet))
        rep.details["Theta equals stored form"] = "yes" if diff.integrand.is_zero() else "no"
        if not same or not diff.integrand.is_zero():
            rep.status = "fail"
    return rep


def check_compatibility(model: ModelBundle | str, pair=("K1", "K2"), scalar_pair=None,
                        id_: str | None = None) -> CheckReport:
    m = get_model(model) if isinstance(model, str) else model
    if scalar_pair is not None:
        jet = scalar_space()
        A = scalar_op(jet, [tuple(t) for t in scalar_pair[0]])
        B = scalar_op(jet, [tuple(t) for t in scalar_pair[1]])
        return compatibility_check(A, B, ["v"], id_ or f"{m.name}.compatibility.scalar", m.name,
                                   "compatibility of a scalar pair")
    A, B = (m.operators[p] for p in pair)
    return compatibility_check(A, B, list(m.operator_order),
                               id_ or f"{m.name}.compatibility.{pair[0]}-{pair[1]}", m.name,
                               "pencil alpha K1 + beta K2 is Hamiltonian")


def check_miura(model: ModelBundle | str = "kdv3", pair: str = "E1",
                id_: str | None = None) -> CheckReport:
    """Compare ``E`` with ``Dphi K Dphi*`` for the map to (u1, v1, w1)."""
    m = get_model(model) if isinstance(model, str) else model
    t0 = time.perf_counter()
    src = get_model(m.extras["source_model"])
    target = dict(m.extras["pairs"])[pair]
    K = src.operators[target]
    exprs = [src.jet.parse(RELA1[v]) for v in m.variables]
    conj = miura_conjugate(K, exprs, list(src.variables), src.jet)
    E = m.operators[pair].subs(dict(m.definitions))
    E = MatrixOp(E.rows, src.jet, E.order)
    details = {}
    factor = None
    for c in (1, -1):
        if (E - conj.scale(c)).is_zero():
            factor = c
            break
    if factor is None:
        diff = E - conj
        text = "\n".join(f"({i + 1},{j + 1}): {a}" for i, r in enumerate(diff.rows)
                         for j, a in enumerate(r) if not a.is_zero())
    else:
        text = "0"
        details["overall factor"] = str(factor)
    return _report(id_ or f"{m.name}.miura.{pair}", m.name, factor is not None, text,
                   f"{pair} against the conjugation of {target} through the potential map",
                   t0, details)


def check_reduction(model: str) -> CheckReport:
    """Zero-curvature and skewness on a reduced bundle, merged into one report."""
    t0 = time.perf_counter()
    m = get_model(model)
    parts = [check_zero_curvature(m)]
    parts += [is_skew_adjoint(m.operators[k], f"skew.{k}", m.name) for k in sorted(m.operators)]
    ok = all(p.passed for p in parts)
    details = {p.id: p.status for p in parts}
    text = "; ".join(f"{p.id}: {p.residual}" for p in parts if not p.passed)
    rep = _report(f"{m.name}.reduction", m.name, ok, text, "reduction of the three-component model",
                  t0, details)
    return rep


def run_check(spec: CheckSpec, numeric_overrides: dict | None = None) -> CheckReport:
    t0 = time.perf_counter()
    p = dict(spec.params)
    try:
        if spec.kind == "zero-curvature":
            rep = check_zero_curvature(spec.model, p.get("perturb"), p.get("negate", False), spec.id)
        elif spec.kind == "conservation":
            rep = check_conservation(spec.model, p.get("density", "s^2"), p.get("flux", "s^2*q"),
                                     spec.id)
        elif spec.kind == "reciprocal-derivation":
            rep = check_reciprocal_derivation(spec.model, p.get("Q1"), spec.id)
        elif spec.kind == "transformed-zc":
            rep = check_transformed_zero_curvature(spec.model, p.get("disable", ()),
                                                   p.get("bindings"), spec.id)
        elif spec.kind == "negative-flow":
            rep = check_negative_flow(spec.model, p.get("perturb_F1"), spec.id)
        elif spec.kind == "reduction":
            rep = check_reduction(spec.model)
            rep.id = spec.id
        elif spec.kind == "skew":
            rep = check_skew(spec.model, p.get("operator"), p.get("scalar"), spec.id)
        elif spec.kind == "jacobi":
            rep = check_jacobi(spec.model, p.get("operator"), p.get("scalar"), spec.id)
        elif spec.kind == "compatibility":
            rep = check_compatibility(spec.model, tuple(p.get("pair", ("K1", "K2"))),
                                      p.get("scalar_pair"), spec.id)
        elif spec.kind == "miura":
            rep = check_miura(spec.model, p.get("pair", "E1"), spec.id)
        else:
            from .numeric.checks import NumericConfig, run_numeric

            fields = NumericConfig.__dataclass_fields__
            cfg = NumericConfig(**{k: v for k, v in p.items() if k in fields})
            cfg = NumericConfig(**{**cfg.as_dict(), **(numeric_overrides or {})})
            rep = run_numeric(p.get("check", "biham"), cfg)
            rep.id = spec.id
    except Exception as exc:  # captured per check; the suite keeps going
        return CheckReport(spec.id, spec.model, "error", f"{type(exc).__name__}: {exc}", "",
                           time.perf_counter() - t0)
    if "expect" in p:
        rep.details["expected"] = p["expect"]
    return rep


def run_suite(specs, numeric_overrides: dict | None = None, jobs: int = 1,
              on_report=None) -> list[CheckReport]:
    """Run every spec; reports come back sorted by id whatever the completion order."""
    specs = list(specs)
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise ValueError("check ids must be unique")
    out = []
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor, as_completed

        with ThreadPoolExecutor(jobs) as pool:
            futs = [pool.submit(run_check, s, numeric_overrides) for s in specs]
            for f in as_completed(futs):
                out.append(f.result())
                if on_report:
                    on_report(out[-1])
    else:
        for s in specs:
            out.append(run_check(s, numeric_overrides))
            if on_report:
                on_report(out[-1])
    return sorted(out, key=lambda r: r.id)


def _spec(id_, model, kind, **params) -> CheckSpec:
    return CheckSpec(id_, model, kind, params)


def claims_suite() -> list[CheckSpec]:
    """Every positive claim, one spec each."""
    S = [
        _spec("ch3.zero-curvature", "ch3", "zero-curvature"),
        _spec("ch3.conservation", "ch3", "conservation"),
        _spec("ch3.reciprocal-derivation", "ch3", "reciprocal-derivation"),
        _spec("ch3.skew.J1", "ch3", "skew", operator="J1"),
        _spec("ch3.skew.J2", "ch3", "skew", operator="J2"),
        _spec("mkdv3.transformed-zc", "mkdv3", "transformed-zc"),
        _spec("mkdv3.transformed-zc.mkdv-slice", "mkdv3", "transformed-zc",
              bindings={"Q2": 0, "Q3": 0, "a": 0, "b": 0}),
        _spec("mkdv3.negative-flow", "mkdv3", "negative-flow"),
        _spec("mkdv3.skew.K1", "mkdv3", "skew", operator="K1"),
        _spec("mkdv3.skew.K2", "mkdv3", "skew", operator="K2"),
        _spec("mkdv3.skew.pencil", "mkdv3", "skew", operator="pencil"),
        _spec("mkdv3.jacobi.K1", "mkdv3", "jacobi", operator="K1"),
        _spec("mkdv3.jacobi.K2", "mkdv3", "jacobi", operator="K2"),
        _spec("mkdv3.jacobi.pencil", "mkdv3", "jacobi", operator="pencil"),
        _spec("mkdv3.compatibility", "mkdv3", "compatibility", pair=["K1", "K2"]),
        _spec("kdv3.skew.E1", "kdv3", "skew", operator="E1"),
        _spec("kdv3.skew.E2", "kdv3", "skew", operator="E2"),
        _spec("kdv3.miura.E1", "kdv3", "miura", pair="E1"),
        _spec("kdv3.miura.E2", "kdv3", "miura", pair="E2"),
    ]
    for r in ("ch", "gx", "novikov"):
        S.append(_spec(f"{r}.reduction", r, "reduction"))
    return S


def numeric_specs() -> list[CheckSpec]:
    from .numeric.checks import NUMERIC_CHECKS

    return [_spec(f"numeric.{n}", "ch3", "numeric", check=n) for n in NUMERIC_CHECKS]


def full_suite() -> list[CheckSpec]:
    return claims_suite() + numeric_specs()


def control_suite() -> list[CheckSpec]:
    """Negative controls; each is expected to fail."""
    return [
        _spec("control.zc-perturbed", "ch3", "zero-curvature", perturb=[2, 1, "lam"], expect="fail"),
        _spec("control.conservation-v", "ch3", "conservation", density="v", flux="v*q",
              expect="fail"),
        _spec("control.reciprocal-Q1", "ch3", "reciprocal-derivation", Q1="v_y/(4*v)",
              expect="fail"),
        _spec("control.tzc-no-F1", "mkdv3", "transformed-zc", disable=["a"], expect="fail"),
        _spec("control.tzc-no-F2", "mkdv3", "transformed-zc", disable=["b"], expect="fail"),
        _spec("control.tzc-no-F3", "mkdv3", "transformed-zc", disable=["c"], expect="fail"),
        _spec("control.negflow-F1", "mkdv3", "negative-flow", perturb_F1="Q2", expect="fail"),
        _spec("control.skew-d2", "ch3", "skew", scalar=[["1", 2]], expect="fail"),
        _spec("control.jacobi-vx", "ch3", "jacobi", scalar=[["2*v_x", 1], ["v_xx", 0]],
              expect="fail"),
        _spec("control.compat-d3-vdv", "ch3", "compatibility",
              scalar_pair=[[["1", 3]], [["v^2", 1], ["v*v_x", 0]]], expect="fail"),
    ]


def specs_from_json(text: str) -> list[CheckSpec]:
    data = json.loads(text)
    items = data["checks"] if isinstance(data, dict) else data
    return [CheckSpec(d["id"], d["model"], d["kind"], d.get("params", {})) for d in items]


def specs_to_json(specs) -> str:
    return json.dumps({"checks": [{"id": s.id, "model": s.model, "kind": s.kind,
                                   "params": s.params} for s in specs]}, indent=2) + "\n"


__all__ = [
    "CheckSpec", "KINDS", "check_compatibility", "check_conservation", "check_jacobi",
    "check_miura", "check_negative_flow", "check_reciprocal_derivation", "check_reduction",
    "check_skew", "check_transformed_zero_curvature", "check_zero_curvature", "control_suite",
    "full_suite", "numeric_specs",
    "claims_suite", "reciprocal_identities", "run_check", "run_suite", "specs_from_json",
    "specs_to_json", "zero_curvature_residual",
]
