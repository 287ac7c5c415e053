from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anharmonic import ordering
from anharmonic.fock import ContractError
from anharmonic.ordering import OperatorPoly

import oracles

coeff = st.integers(-5, 5)
polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeff, max_size=4).map(OperatorPoly)


def test_t_coeff_values():
    assert [ordering.t_coeff(r) for r in (0, 2, 4, 6, 8)] == [1, 1, 3, 15, 105]
    for bad in (-2, 3):
        with pytest.raises(ValueError):
            ordering.t_coeff(bad)


def test_falling_factorial():
    assert ordering.falling_factorial(5, 2) == 20
    assert ordering.falling_factorial(2, 3) == 0
    assert ordering.falling_factorial(-1, 2) == 2


@pytest.mark.parametrize("m", range(0, 7))
def test_against_sympy(m):
    assert ordering.normal_order_power(m).terms == oracles.sympy_normal_order(m)


@pytest.mark.parametrize("m", range(0, 13))
def test_closed_form_equals_brute_force(m):
    assert ordering.normal_order_power(m) == ordering.brute_force_normal_order(m)


def test_brute_force_guard():
    with pytest.raises(ValueError):
        ordering.brute_force_normal_order(17)
    with pytest.raises(ContractError):
        ordering.colon_power(-1)


def test_induction_matches_closed_form():
    for m, p in enumerate(ordering.normal_order_power_by_induction(10)):
        assert p == ordering.normal_order_power(m)


def test_theorem1_step_contract():
    with pytest.raises(ContractError):
        ordering.theorem1_step(ordering.colon_power(3), 4)
    step = ordering.theorem1_step(ordering.colon_power(3), 3)
    assert step == ordering.colon_power(4) + ordering.colon_power(2).scale(3)


def test_expansion_coefficients_frozen():
    assert ordering.colon_coefficients(4) == (1, 6, 3)
    assert ordering.colon_coefficients(9) == (1, 36, 378, 1260, 945)
    assert ordering.colon_coefficients(12)[-1] == 10395


@given(polys, polys, polys)
def test_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(polys, polys)
def test_adjoint_reverses_products(a, b):
    assert (a * b).adjoint() == b.adjoint() * a.adjoint()


@settings(max_examples=40)
@given(polys, polys)
def test_product_matches_matrices(a, b):
    dim, keep = 16, 8
    lhs = (a * b).to_matrix(dim)[:keep, :keep]
    rhs = (a.to_matrix(dim) @ b.to_matrix(dim))[:keep, :keep]
    assert np.allclose(lhs, rhs)


@given(polys)
def test_colon_decompose_roundtrip(p):
    combo = OperatorPoly()
    for k, c in enumerate(p.terms.values()):
        combo = combo + ordering.colon_power(k).scale(c)
    parts = ordering.colon_decompose(combo)
    back = OperatorPoly()
    for k, c in parts.items():
        back = back + ordering.colon_power(k).scale(c)
    assert back == combo


def test_colon_decompose_rejects():
    with pytest.raises(ContractError):
        ordering.colon_decompose(OperatorPoly({(1, 1): 1}))


@given(st.integers(0, 12), st.integers(0, 8))
def test_number_expectation_matches_matrix(m, n):
    p = ordering.normal_order_power(min(m, 8))
    dim = n + 12
    assert float(ordering.number_expectation(p, n)) == pytest.approx(p.to_matrix(dim)[n, n].real, rel=1e-12)


def test_self_adjoint_and_fraction_terms():
    p = ordering.normal_order_power(6)
    assert p.is_self_adjoint() and p.degree == 6 and p.coeff(0, 0) == 15
    half = p.scale(Fraction(1, 2))
    assert half.coeff(0, 0) == Fraction(15, 2) and isinstance(half.coeff(6, 0), Fraction)
    assert half.scale(2) == p and hash(half.scale(2)) == hash(p)
    with pytest.raises(ContractError):
        OperatorPoly({(-1, 0): 1})
