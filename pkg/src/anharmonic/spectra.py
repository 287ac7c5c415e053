"""Perturbative energies, level spacings and frequency operators.

Frequency operators are polynomials in the diagonal operator H0 = a^dag a + 1/2,
held as exact rational coefficient lists (:class:`FreqPolynomial`).  Three related
objects appear:

* ``omega(m, n)``: the first-order level spacing E_n - E_{n-1} (coefficient of lambda);
* the multiple-scale frequency ``mspt_omega_operator(m)``, fixed by
  Omega(n + 1/2) + Omega(n - 1/2) = 2 omega(m, n);
* the Heisenberg frequency operator ``freq_operator_first(m)``, whose diagonal is the
  spacing above each level, <n|Omega_1|n> = E_{n+1} - E_n.

They are tied together by the averaging map P(H0) -> (P(H0) + P(H0 + 1)) / 2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg

from .fock import OscillatorSpec, hamiltonian, ladder_ops, quadratures
from .ordering import falling_factorial, t_coeff

PERTURBATIVE_LIMIT = 0.1
HALF = Fraction(1, 2)


class PerturbativeWarning(UserWarning):
    """lambda n^(m/2 - 1) is too large for a low-order expansion to be trusted."""


def _check_m(m: int) -> None:
    if m < 4 or m % 2:
        raise ValueError(f"m must be an even integer >= 4, got {m}")


@dataclass(frozen=True)
class FreqPolynomial:
    """Polynomial sum_j coeffs[j] H0^j with exact rational coefficients."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def constant(cls, c) -> "FreqPolynomial":
        return cls((Fraction(c),))

    @classmethod
    def h0(cls) -> "FreqPolynomial":
        return cls((Fraction(0), Fraction(1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, h):
        out = Fraction(0) if isinstance(h, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            out = out * h + c
        return out

    def at_level(self, n: int) -> Fraction:
        """Value at H0 = n + 1/2."""
        return self(Fraction(n) + HALF)

    def __add__(self, other: "FreqPolynomial") -> "FreqPolynomial":
        k = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (k - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (k - len(other.coeffs))
        return FreqPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "FreqPolynomial") -> "FreqPolynomial":
        return self + other.scale(-1)

    def scale(self, c) -> "FreqPolynomial":
        return FreqPolynomial(tuple(x * Fraction(c) for x in self.coeffs))

    def __mul__(self, other: "FreqPolynomial") -> "FreqPolynomial":
        if not self.coeffs or not other.coeffs:
            return FreqPolynomial(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return FreqPolynomial(tuple(out))

    def shift(self, s) -> "FreqPolynomial":
        """P(H0 + s)."""
        out = FreqPolynomial(())
        base = FreqPolynomial((Fraction(s), Fraction(1)))
        power = FreqPolynomial.constant(1)
        for c in self.coeffs:
            out = out + power.scale(c)
            power = power * base
        return out

    def to_matrix(self, dim: int) -> np.ndarray:
        h = np.arange(dim, dtype=float) + 0.5
        return np.diag(np.array([float(self(x)) for x in h])).astype(complex)

    def __repr__(self):
        return "FreqPolynomial(" + ", ".join(str(c) for c in self.coeffs) + ")"


def interpolate(points: Sequence[Tuple[Fraction, Fraction]]) -> FreqPolynomial:
    """Exact Lagrange interpolation through (h, value) pairs."""
    out = FreqPolynomial(())
    for i, (hi, vi) in enumerate(points):
        term = FreqPolynomial.constant(vi)
        for j, (hj, _) in enumerate(points):
            if j != i:
                term = term * FreqPolynomial((-Fraction(hj), Fraction(1))).scale(Fraction(1) / (hi - hj))
        out = out + term
    return out


def _falling_poly(offset: Fraction, k: int) -> FreqPolynomial:
    """(H0 + offset)(H0 + offset - 1)...(k factors) as a polynomial in H0."""
    out = FreqPolynomial.constant(1)
    for i in range(k):
        out = out * FreqPolynomial((offset - i, Fraction(1)))
    return out


# first order, general m -------------------------------------------------------


def first_order_coeff(m: int, n: int) -> Fraction:
    """lambda-coefficient of E_n; a polynomial in n, so negative n is a valid continuation."""
    _check_m(m)
    total = 0
    for r in range(0, m + 1, 2):
        k = (m - r) // 2
        total += t_coeff(r) * comb(m, r) * comb(m - r, k) * falling_factorial(n, k)
    return Fraction(total, 2 ** (m // 2) * m)


@dataclass(frozen=True)
class FirstOrderEnergy:
    base: Fraction
    lam_coeff: Fraction

    def value(self, lam: float) -> float:
        return float(self.base) + lam * float(self.lam_coeff)


def first_order_energy(m: int, n: int) -> FirstOrderEnergy:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return FirstOrderEnergy(Fraction(n) + HALF, first_order_coeff(m, n))


def _omega(m: int, n: int) -> Fraction:
    return first_order_coeff(m, n) - first_order_coeff(m, n - 1)


def level_spacing_first(m: int, n: int) -> Fraction:
    """omega(m, n): first-order coefficient of E_n - E_{n-1}."""
    if n < 1:
        raise ValueError(f"level spacing needs n >= 1, got {n}")
    return _omega(m, n)


def mspt_omega_half(m: int, n: int) -> Fraction:
    """Multiple-scale frequency Omega at H0 = n + 1/2.

    The alternating sum needs omega(m, 0) = E_0 - E_{-1}, taken from the polynomial
    continuation of the first-order energy.
    """
    _check_m(m)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    s = sum((-1) ** (n - k) * _omega(m, k) for k in range(n + 1))
    tail = Fraction((-1) ** (n + m // 2) * t_coeff(m), 2 ** ((m - 2) // 2) * m)
    return 2 * s + tail


def mspt_omega_operator(m: int) -> FreqPolynomial:
    """Omega(H0) interpolated exactly from its values at n + 1/2."""
    pts = [(Fraction(n) + HALF, mspt_omega_half(m, n)) for n in range(m // 2 + 1)]
    return interpolate(pts)


def mspt_normalizer(m: int, n: int, lam: float, t: float) -> float:
    """G = 2 cos[(lambda t / 2)(Omega(n + 1/2) - Omega(n - 1/2))]."""
    op = mspt_omega_operator(m)
    diff = op.at_level(n) - op.at_level(n - 1)
    return float(2 * np.cos(0.5 * lam * t * float(diff)))


def freq_operator_first(m: int) -> FreqPolynomial:
    """Heisenberg frequency operator Omega_1(H0) for the m-th oscillator.

    Only the balanced terms a^dag^(k-1) a^(k-1) of the normal-ordered perturbation
    contribute, and a^dag^j a^j = (H0 - 1/2)(H0 - 3/2)...(j factors).
    """
    _check_m(m)
    out = FreqPolynomial(())
    for r in range(0, m // 2):
        M = m - 2 * r
        k = M // 2
        c = k * t_coeff(2 * r) * comb(m, 2 * r) * comb(M, k)
        out = out + _falling_poly(-HALF, k - 1).scale(c)
    return out.scale(Fraction(1, m * 2 ** (m // 2)))


def average_map(p: FreqPolynomial) -> FreqPolynomial:
    """P(H0) -> (P(H0) + P(H0 + 1)) / 2."""
    return (p + p.shift(1)).scale(HALF)


def inverse_average_map(P: FreqPolynomial) -> FreqPolynomial:
    """The unique polynomial p with average_map(p) == P.

    average_map is the identity plus a strictly degree-lowering part, so the fixed
    point iteration p <- p + (P - average_map(p)) terminates after deg + 1 steps.
    """
    p = P
    for _ in range(P.degree + 2):
        resid = P - average_map(p)
        if not resid.coeffs:
            return p
        p = p + resid
    raise ArithmeticError("inverse averaging did not terminate")


def equivalence_maps(omega1: FreqPolynomial) -> Tuple[FreqPolynomial, FreqPolynomial]:
    """(Omega_1, omega_1 recovered from Omega_1) for a multiple-scale frequency omega_1."""
    big = average_map(omega1)
    return big, inverse_average_map(big)


# second order, quartic ---------------------------------------------------------


@dataclass(frozen=True)
class QuarticSecondOrder:
    n: int
    lam: float
    psi: float
    energy: float
    delta_e: float


def quartic_psi_coeffs(n: int) -> Tuple[Fraction, Fraction, Fraction]:
    return (Fraction(1), Fraction(3, 4) * (n + HALF), -Fraction(51 * n * n + 51 * n + 21, 64))


def quartic_energy_coeffs(n: int) -> Tuple[Fraction, Fraction, Fraction]:
    return (
        Fraction(n) + HALF,
        Fraction(3, 8) * (n * n + n + HALF),
        -Fraction(34 * n**3 + 51 * n**2 + 59 * n + 21, 128),
    )


def quartic_spacing_coeffs(n: int) -> Tuple[Fraction, Fraction, Fraction]:
    """E_n - E_{n-1} through lambda^2."""
    return (Fraction(1), Fraction(3 * n, 4), -Fraction(51 * n * n + 21, 64))


def _series(c, lam: float) -> float:
    return float(c[0]) + lam * float(c[1]) + lam**2 * float(c[2])


def quartic_second_order(n: int, lam: float) -> QuarticSecondOrder:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return QuarticSecondOrder(
        n=n,
        lam=lam,
        psi=_series(quartic_psi_coeffs(n), lam),
        energy=_series(quartic_energy_coeffs(n), lam),
        delta_e=_series(quartic_spacing_coeffs(n), lam),
    )


def quartic_omega2_operators(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """lambda^2 parts (Omega_2, omega_2) of the quartic frequency operators, as matrices.

    Omega_2 = -(69 H0^2 + 51 H0 - 12 X^4 + 153/4)/64
    omega_2 = -(69 H0^2 - 12 X^4 + 51/4)/64
    """
    a, ad = ladder_ops(dim)
    X, _ = quadratures(dim)
    H0 = ad @ a + 0.5 * np.eye(dim)
    X4 = np.linalg.matrix_power(X, 4)
    big = -(69 * H0 @ H0 + 51 * H0 - 12 * X4 + 153 / 4 * np.eye(dim)) / 64
    small = -(69 * H0 @ H0 - 12 * X4 + 51 / 4 * np.eye(dim)) / 64
    return big, small


# diagonal parts; <n|X^4|n> = (3/2) H0^2 + 3/8
OMEGA2_DIAG = FreqPolynomial((-Fraction(33, 256), Fraction(0), -Fraction(51, 64)))
BIG_OMEGA2_DIAG = FreqPolynomial((-Fraction(135, 256), -Fraction(51, 64), -Fraction(51, 64)))


def alternative_spacing_second(n: int) -> Fraction:
    """Second-order spacing produced by the competing published recipe; disagrees with ours."""
    return -Fraction(3, 64) * (5 * n * n - 1)


# numerics ----------------------------------------------------------------------


def perturbative_ok(m: int, lam: float, n: int) -> bool:
    return lam * max(n, 1) ** (m / 2 - 1) <= PERTURBATIVE_LIMIT


def check_perturbative(m: int, lam: float, n: int) -> bool:
    ok = perturbative_ok(m, lam, n)
    if not ok:
        warnings.warn(
            f"lambda * n^(m/2-1) = {lam * max(n, 1) ** (m / 2 - 1):.3g} exceeds {PERTURBATIVE_LIMIT}",
            PerturbativeWarning,
            stacklevel=2,
        )
    return ok


def numerical_spacings(spec: OscillatorSpec) -> np.ndarray:
    """Consecutive eigenvalue gaps of the truncated Hamiltonian (low levels are reliable)."""
    return np.diff(linalg.eigvalsh(hamiltonian(spec)))
