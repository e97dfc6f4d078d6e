from hypothesis import given
from hypothesis import strategies as st

from ch3lab.multivec import (characteristic, compatibility_check, graded_components,
                             jacobi_check, odd_degree, pencil, scalar_op, scalar_space,
                             theta_form)

S = scalar_space()


def op(*terms):
    return scalar_op(S, list(terms))


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4).filter(any))
def test_hydrodynamic_scalar_operators_are_hamiltonian(cs):
    # g(v) D + 1/2 g'(v) v_x for a polynomial g
    g = " + ".join(f"{c}*v^{k}" for k, c in enumerate(cs) if c)
    dg = " + ".join(f"{k * c}/2*v^{k - 1}*v_x" for k, c in enumerate(cs) if c and k)
    L = op((g, 1), (dg, 0)) if dg else op((g, 1))
    assert jacobi_check(L, ["v"]).status == "pass"


def test_constant_operators_are_hamiltonian():
    for k in (1, 3, 5):
        assert jacobi_check(op(("1", k)), ["v"]).status == "pass"


def test_kdv_second_structure():
    assert jacobi_check(op(("1", 3), ("4*v", 1), ("2*v_x", 0)), ["v"]).status == "pass"


def test_vx_operator_fails_jacobi():
    r = jacobi_check(op(("2*v_x", 1), ("v_xx", 0)), ["v"])
    assert r.status == "fail" and r.residual != "0"


def test_kdv_pair_compatible():
    r = compatibility_check(op(("1", 1)), op(("1", 3), ("4*v", 1), ("2*v_x", 0)), ["v"])
    assert r.status == "pass"


def test_incompatible_pair():
    r = compatibility_check(op(("1", 3)), op(("v^2", 1), ("v*v_x", 0)), ["v"])
    assert r.status == "fail"


def test_pencil_grades():
    P = pencil(op(("1", 1)), op(("1", 3)))
    ch = characteristic(P, ["v"])
    parts = graded_components(ch[0])
    assert parts == {(1, 0): S.parse("theta1_x"), (0, 1): S.parse("theta1_xxx")}


def test_theta_form_is_bivector():
    Theta = theta_form(op(("1", 1)), ["v"])
    assert Theta.degree == 2
    assert odd_degree(Theta.integrand) == 2
    assert Theta.integrand == S.parse("1/2*theta1*theta1_x")
