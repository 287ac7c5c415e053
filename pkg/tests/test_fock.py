import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anharmonic import fock
from anharmonic.fock import ContractError, InvalidDimensionError, OscillatorSpec, TruncationError

import oracles


def test_ladder_action():
    a, ad = fock.ladder_ops(6)
    for n in range(1, 6):
        assert a[n - 1, n] == pytest.approx(np.sqrt(n))
    comm = a @ ad - ad @ a
    assert np.allclose(fock.interior(comm), np.eye(5))


def test_quadrature_conventions():
    X, Xd = fock.quadratures(8)
    a, ad = fock.ladder_ops(8)
    assert np.allclose(X, (a + ad) / np.sqrt(2))
    assert np.allclose(Xd, 1j * (ad - a) / np.sqrt(2))
    # [X, Xdot] = i away from the edge
    assert np.allclose(fock.interior(X @ Xd - Xd @ X), 1j * np.eye(7))


@given(st.integers(0, 4), st.integers(0, 4))
def test_ladder_monomial_matches_products(p, q):
    dim = 14
    a, ad = fock.ladder_ops(dim + 8)
    ref = np.linalg.matrix_power(ad, p) @ np.linalg.matrix_power(a, q)
    assert np.allclose(fock.ladder_monomial(p, q, dim + 8)[:dim, :dim], ref[:dim, :dim])


def test_ladder_monomial_rejects_negative():
    with pytest.raises(ContractError):
        fock.ladder_monomial(-1, 0, 4)


@pytest.mark.parametrize("bad", [dict(m=5, lam=0.1), dict(m=2, lam=0.1), dict(m=4, lam=-0.1),
                                 dict(m=4, lam=float("nan"))])
def test_spec_contract(bad):
    with pytest.raises(ContractError):
        OscillatorSpec(**bad)


def test_spec_dimension():
    with pytest.raises(InvalidDimensionError):
        OscillatorSpec(6, 0.1, dim=9)
    assert OscillatorSpec(4, 0.16).lambda_prime == pytest.approx(0.01)


@settings(max_examples=30)
@given(st.floats(0, 3), st.floats(-np.pi, np.pi))
def test_coherent_state_eigenvector(alpha, theta):
    psi = fock.coherent_state(alpha, theta)
    a, ad = fock.ladder_ops(psi.dim)
    z = alpha * np.exp(1j * theta)
    assert np.linalg.norm(psi.amp) == pytest.approx(1)
    assert fock.expectation(a, psi) == pytest.approx(z, abs=1e-9)
    assert fock.expectation(ad @ a, psi).real == pytest.approx(alpha**2, abs=1e-8)
    assert np.allclose(psi.amp, oracles.coherent(alpha, theta, psi.dim), atol=1e-12)


def test_coherent_truncation_error():
    with pytest.raises(TruncationError) as exc:
        fock.coherent_state(3.0, 0.0, dim=10)
    need = exc.value.required_dim
    assert fock.poisson_tail(9.0, need) <= 1e-12
    fock.coherent_state(3.0, 0.0, dim=need)


def test_required_dim_is_minimal():
    d = fock.required_dim(4.0, 1e-10)
    assert fock.poisson_tail(4.0, d) <= 1e-10 < fock.poisson_tail(4.0, d - 1)


def test_number_state_bounds():
    assert fock.number_state(2, 5).amp[2] == 1
    with pytest.raises(InvalidDimensionError):
        fock.number_state(5, 5)


def test_hamiltonian_matches_reference():
    spec = OscillatorSpec(6, 0.05, dim=20)
    assert np.allclose(fock.hamiltonian(spec), oracles.anharmonic_h(6, 0.05, 20))
    assert fock.is_hermitian(fock.hamiltonian(spec))


@pytest.mark.parametrize("t", [0.3, 2.0])
def test_heisenberg_matches_expm(t):
    spec = OscillatorSpec(4, 0.1, dim=24)
    H = fock.hamiltonian(spec)
    a, _ = fock.ladder_ops(24)
    assert np.allclose(fock.heisenberg_exact(H, a, t), oracles.heisenberg(H, a, t), atol=1e-10)
    U = fock.Spectrum.of(H).propagator(t)
    assert np.allclose(U @ U.conj().T, np.eye(24), atol=1e-12)


def test_spectrum_rejects_non_hermitian():
    with pytest.raises(ContractError):
        fock.Spectrum.of(np.array([[0, 1], [0, 0]], dtype=complex))


def test_variance_requires_hermitian():
    psi = fock.number_state(1, 4)
    a, ad = fock.ladder_ops(4)
    with pytest.raises(ContractError):
        fock.variance(a, psi)
    # number state: Var(X) = n + 1/2
    X, _ = fock.quadratures(4)
    assert fock.variance(X, psi) == pytest.approx(1.5)


def test_free_evolution_of_state():
    psi = fock.coherent_state(1.0, 0.0, 20)
    out = fock.evolve_state(fock.free_hamiltonian(20), psi, np.pi / 2)
    a, _ = fock.ladder_ops(20)
    # a(t) = e^{-it} a, so alpha rotates to -i up to the global phase
    assert fock.expectation(a, out) == pytest.approx(-1j, abs=1e-10)
