"""Aharonov-Anandan geometric phase of a cyclic anharmonic evolution.

For H = a^dag a + lam' (1 + F) with the gauge f(t) = lam' t, the evolution closes
after T = 2 pi / lam' and

    beta = 2 pi + sum_n |C_n|^2 (2 pi n / lam') + 2 pi sum_{k,n} C_k^* C_n <k|F|n>

for an input state sum_n C_n |n>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Dict, Optional, Sequence

import numpy as np
from scipy import special, stats as sps

from .fock import ContractError, coherent_state, is_hermitian
from .ordering import normal_order_power, t_coeff

TAIL = 1e-12


@dataclass(frozen=True)
class InputStatistics:
    """Amplitudes C_n of the input field on n = 0..dim-1."""

    amp: np.ndarray
    family: str = "custom"
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=complex)
        norm = np.linalg.norm(amp)
        if amp.ndim != 1 or norm == 0:
            raise ContractError("amplitudes must be a non-zero vector")
        object.__setattr__(self, "amp", amp / norm)

    @property
    def dim(self) -> int:
        return self.amp.size

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.amp) ** 2

    def with_phases(self, phases: np.ndarray) -> "InputStatistics":
        return InputStatistics(np.abs(self.amp) * np.exp(1j * np.asarray(phases)), self.family, dict(self.params))


def _from_weights(w: np.ndarray, theta: float, family: str, params: Dict[str, float]) -> InputStatistics:
    n = np.arange(w.size)
    return InputStatistics(np.sqrt(w) * np.exp(1j * theta * n), family, params)


def _size(sf, start: int, extra: int) -> int:
    dim = max(start, 2)
    while sf(dim - 1) > TAIL:
        dim += max(1, dim // 8)
    return dim + extra


def binomial(N: int, p: float, theta: float = 0.0) -> InputStatistics:
    """Sub-Poissonian input."""
    if not 0 <= p <= 1 or N < 0:
        raise ContractError("binomial needs N >= 0 and 0 <= p <= 1")
    w = sps.binom.pmf(np.arange(N + 1), N, p)
    return _from_weights(w, theta, "binomial", {"N": N, "p": p})


def poisson(alpha_mag: float, theta: float = 0.0, extra: int = 8) -> InputStatistics:
    """Poissonian (coherent) input, C_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!)."""
    mean = alpha_mag**2
    dim = _size(lambda k: sps.poisson.sf(k, mean), int(mean) + 2, extra)
    st = coherent_state(alpha_mag, theta, dim, tail_bound=TAIL)
    return InputStatistics(st.amp, "poisson", {"alpha": alpha_mag, "theta": theta})


def negative_binomial(W: int, q: float, theta: float = 0.0, extra: int = 8) -> InputStatistics:
    """Super-Poissonian input, |C_n|^2 = C(n+W-1, n) q^n (1-q)^W."""
    if not 0 <= q < 1 or W < 1:
        raise ContractError("negative binomial needs W >= 1 and 0 <= q < 1")
    dim = _size(lambda k: sps.nbinom.sf(k, W, 1 - q), 2, extra)
    w = sps.nbinom.pmf(np.arange(dim), W, 1 - q)
    return _from_weights(w, theta, "negative-binomial", {"W": W, "q": q})


def _check_lp(lambda_prime: float) -> None:
    if not lambda_prime > 0:
        raise ValueError(f"lambda' must be > 0 for a finite cyclic period, got {lambda_prime}")


def aa_phase_general(st: InputStatistics, lambda_prime: float, F: np.ndarray) -> float:
    """beta by direct double summation over the truncated basis."""
    _check_lp(lambda_prime)
    if F.shape != (st.dim, st.dim):
        raise ContractError(f"F has shape {F.shape}, state has dim {st.dim}")
    if not is_hermitian(F, 1e-10):
        raise ContractError("F must be Hermitian for a real geometric phase")
    n = np.arange(st.dim)
    off = np.vdot(st.amp, F @ st.amp)
    if abs(off.imag) > 1e-12 * max(1.0, abs(off.real)):
        raise ArithmeticError(f"imaginary part {off.imag:.3e} in geometric phase")
    return float(2 * np.pi + np.sum(st.weights * 2 * np.pi * n / lambda_prime) + 2 * np.pi * off.real)


def aa_phase_number_poly(st: InputStatistics, lambda_prime: float, poly: Sequence[float]) -> float:
    """F = P(a^dag a) with P given by ascending coefficients."""
    _check_lp(lambda_prime)
    n = np.arange(st.dim, dtype=float)
    P = np.polynomial.polynomial.polyval(n, np.asarray(poly, dtype=float)) if len(poly) else 0.0
    return float(np.sum(st.weights * 2 * np.pi * (1 + n / lambda_prime + P)))


def aa_phase_m(st: InputStatistics, m: int, lambda_prime: float) -> float:
    """F = (a^dag + a)^m through its normal-ordered expansion and factorial matrix elements."""
    _check_lp(lambda_prime)
    C = st.amp
    dim = st.dim
    n = np.arange(dim)
    total = 0j
    for r in range(m // 2 + 1):
        M = m - 2 * r
        base = t_coeff(2 * r) * comb(m, 2 * r)
        for p in range(M + 1):
            k = n - M + 2 * p
            low = n - M + p
            ok = (low >= 0) & (k >= 0) & (k < dim)
            nn, kk, ll = n[ok], k[ok], low[ok]
            elem = np.exp(0.5 * (special.gammaln(nn + 1) + special.gammaln(kk + 1)) - special.gammaln(ll + 1))
            total += base * comb(M, p) * np.sum(np.conj(C[kk]) * C[nn] * elem)
    return float(2 * np.pi + np.sum(st.weights * 2 * np.pi * n / lambda_prime) + 2 * np.pi * total.real)


def aa_phase_quartic_coherent(
    alpha_mag: float, theta: float, lambda_prime: float, variant: str = "corrected"
) -> float:
    """Closed form for a coherent input and F = (a^dag + a)^4.

    The printed variant carries |alpha|^2 instead of |alpha|^4 on the cos 4 theta term.
    """
    _check_lp(lambda_prime)
    if variant not in ("corrected", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    A = alpha_mag**2
    c4 = A**2 if variant == "corrected" else A
    return float(8 * np.pi + 2 * np.pi * (
        6 * A**2 + 12 * A + A / lambda_prime + 4 * A * (2 * A + 3) * np.cos(2 * theta) + 2 * c4 * np.cos(4 * theta)))


def quartic_F(dim: int, m: int = 4) -> np.ndarray:
    """(a^dag + a)^m rendered from its exact normal-ordered form (no edge artifacts)."""
    return normal_order_power(m).to_matrix(dim).real.astype(complex)


def joshi_phase(st: InputStatistics, lambda_prime: float, include_dynamical_term: bool = True) -> float:
    """Kerr case F = a^dag^2 a^2 = n^2 - n; the competing result omits the 2 pi n / lam' term."""
    if include_dynamical_term:
        return aa_phase_number_poly(st, lambda_prime, [0, -1, 1])
    n = np.arange(st.dim, dtype=float)
    return float(np.sum(st.weights * 2 * np.pi * (1 + n * n - n)))


def vacuum(dim: int = 8) -> InputStatistics:
    amp = np.zeros(dim, dtype=complex)
    amp[0] = 1
    return InputStatistics(amp, "vacuum")


def custom(amp: Sequence[complex], family: Optional[str] = None) -> InputStatistics:
    return InputStatistics(np.asarray(amp, dtype=complex), family or "custom")
