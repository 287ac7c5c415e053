"""First-order field evolution for the m-th anharmonic oscillator.

Heisenberg-picture a(t) = e^{-it} a_I(t) with

    a_I(t) = a - lam' sum_{r, p} c_{r,p} p f_k(t) a^dag^(p-1) a^q,

where M = m - 2r, q = M - p, k = p - q, c_{r,p} = t_{2r} C(m, 2r) C(M, p) and
f_k(t) = (e^{ikt} - 1)/k.  The resonant term k = 0 uses f_0 = it, which is the
secular piece; ``a_secular_removed`` resums it into e^{-i lam Omega_1(H0) t}.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .fock import OscillatorSpec, default_dim, ladder_monomial, ladder_ops, quadratures
from .ordering import t_coeff
from .spectra import freq_operator_first, mspt_omega_operator

SECULAR_LIMIT = 0.3


def secular_ok(lam: float, t: float) -> bool:
    """First-order secular terms are trusted only while lam * t stays small."""
    return abs(lam * t) <= SECULAR_LIMIT


@dataclass(frozen=True)
class DCoeffs:
    """a(t) = D1 a + D2 a^dag - (D3 a^3 + D4 a^dag^3 + D5 a^dag^2 a + D6 a^dag a^2)."""

    d1: complex
    d2: complex
    d3: complex
    d4: complex
    d5: complex
    d6: complex

    def as_tuple(self) -> Tuple[complex, ...]:
        return (self.d1, self.d2, self.d3, self.d4, self.d5, self.d6)


def quartic_d_coeffs(lam: float, t: float) -> DCoeffs:
    e = np.exp
    return DCoeffs(
        d1=complex((1 - 0.75j * lam * t) * e(-1j * t)),
        d2=complex(-0.75j * lam * np.sin(t)),
        d3=complex(0.25j * lam * np.sin(t) * e(-2j * t)),
        d4=complex(0.125j * lam * np.sin(2 * t) * e(1j * t)),
        d5=complex(0.75j * lam * np.sin(t)),
        d6=complex(0.75j * lam * t * e(-1j * t)),
    )


# (p, q) powers of a^dag^p a^q multiplying D3..D6
_D_TERMS = ((0, 3), (3, 0), (2, 1), (1, 2))


def assemble_a(d: DCoeffs, dim: int) -> np.ndarray:
    a, ad = ladder_ops(dim)
    out = d.d1 * a + d.d2 * ad
    for c, (p, q) in zip(d.as_tuple()[2:], _D_TERMS):
        out = out - c * ladder_monomial(p, q, dim)
    return out


def _terms(m: int) -> Iterator[Tuple[int, int, int, int]]:
    """(coefficient c * p, p, q, k) of each a^dag^(p-1) a^q term in a_I."""
    for r in range(m // 2):
        M = m - 2 * r
        base = t_coeff(2 * r) * comb(m, 2 * r)
        for p in range(1, M + 1):
            q = M - p
            yield base * comb(M, p) * p, p, q, p - q


def _f(k: int, t: float) -> complex:
    if k == 0:
        return 1j * t
    return (np.exp(1j * k * t) - 1) / k


def a_first_order(spec: OscillatorSpec, t: float) -> np.ndarray:
    """Heisenberg a(t) to first order in lambda, secular term included."""
    dim = spec.dim
    a, _ = ladder_ops(dim)
    corr = np.zeros((dim, dim), dtype=complex)
    for c, p, q, k in _terms(spec.m):
        corr += c * _f(k, t) * ladder_monomial(p - 1, q, dim)
    return np.exp(-1j * t) * (a - spec.lambda_prime * corr)


PLACEMENTS = ("left", "middle", "right")


def a_secular_removed(spec: OscillatorSpec, t: float, placement: str = "left") -> np.ndarray:
    """a(t) with the resonant secular term resummed into a frequency operator.

    Each non-resonant term a^dag^(p-1) a^q carries the dressing
    exp(i lam Omega_1 t (k - 1)); ``placement`` selects where that diagonal factor
    sits: before a^dag^(p-1), between the two powers, or after a^q.
    """
    if placement not in PLACEMENTS:
        raise ValueError(f"placement must be one of {PLACEMENTS}, got {placement!r}")
    dim = spec.dim
    a, _ = ladder_ops(dim)
    omega = np.array([float(freq_operator_first(spec.m)(n + 0.5)) for n in range(dim)])
    out = np.exp(-1j * spec.lam * omega * t)[:, None] * a
    corr = np.zeros((dim, dim), dtype=complex)
    for c, p, q, k in _terms(spec.m):
        if k == 0:
            continue
        dress = np.exp(1j * spec.lam * omega * t * (k - 1))
        if placement == "left":
            term = dress[:, None] * ladder_monomial(p - 1, q, dim)
        elif placement == "right":
            term = ladder_monomial(p - 1, q, dim) * dress[None, :]
        else:
            term = ladder_monomial(p - 1, 0, dim) @ (dress[:, None] * ladder_monomial(0, q, dim))
        corr += c * _f(k, t) * term
    return np.exp(-1j * t) * (out - spec.lambda_prime * corr)


@dataclass(frozen=True)
class NumberOperators:
    N: np.ndarray
    N2: np.ndarray


def number_evolved(
    N0: float, theta: float, lam: float, t: float, dim: Optional[int] = None
) -> NumberOperators:
    """N(t) and N(t)^2 for the quartic oscillator, first order in lambda.

    The operators do not depend on the input state; N0 only sizes the basis.
    """
    if dim is None:
        dim = default_dim(float(np.sqrt(max(N0, 0.0))))
    d = quartic_d_coeffs(lam, t)
    # D2..D6 are already O(lambda), so only the zeroth-order part of D1 is kept
    D1c = np.exp(1j * t)
    M = lambda p, q: ladder_monomial(p, q, dim)  # noqa: E731

    def hc(X):
        return X + X.conj().T

    N = M(1, 1) + hc(D1c * d.d2 * M(2, 0))
    N2 = M(2, 2) + M(1, 1) + hc(2 * D1c * d.d2 * (M(3, 1) + M(2, 0)))
    # D3..D6 pair with a^dag(t) a(t) terms a^dag a^3, a^dag^4, a^dag^3 a, a^dag^2 a^2
    n_terms = ((1, 3), (4, 0), (3, 1), (2, 2))
    sq_terms = (((2, 4), (1, 3)), ((5, 1), (4, 0)), ((4, 2), (3, 1)), ((3, 3), (2, 2)))
    for c, (p, q), ((p1, q1), (p2, q2)) in zip(d.as_tuple()[2:], n_terms, sq_terms):
        N = N - hc(D1c * c * M(p, q))
        N2 = N2 - hc(2 * D1c * c * (M(p1, q1) + 2 * M(p2, q2)))
    return NumberOperators(N, N2)


def mspt_position(spec: OscillatorSpec, t: float) -> np.ndarray:
    """Zeroth-order multiple-scale X0(t) with operator phase t(1 + lam Omega(H0)).

    X and Xdot only link |n-1> and |n>; on that pair the normalizer G depends on
    n alone, so it is applied element by element.
    """
    dim = spec.dim
    X, Xd = quadratures(dim)
    op = mspt_omega_operator(spec.m)
    h = np.arange(dim) + 0.5
    phi = t * (1 + spec.lam * np.array([float(op(x)) for x in h]))
    C = np.diag(np.cos(phi))
    S = np.diag(np.sin(phi))
    num = X @ C + C @ X + Xd @ S + S @ Xd
    n = np.arange(1, dim)
    diff = np.array([float(op(k + 0.5) - op(k - 0.5)) for k in n])
    G = 2 * np.cos(0.5 * spec.lam * t * diff)
    out = np.zeros_like(num)
    out[n - 1, n] = num[n - 1, n] / G
    out[n, n - 1] = num[n, n - 1] / G
    return out


def harmonic_content(m: int) -> List[int]:
    """Odd harmonics generated at first order besides the fundamental."""
    if m < 4 or m % 2:
        raise ValueError(f"m must be an even integer >= 4, got {m}")
    return list(range(3, m, 2))
