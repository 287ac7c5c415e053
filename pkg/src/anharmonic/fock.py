"""Truncated Fock-space numerics for a single bosonic mode.

Dense complex matrices on the number basis |0>, ..., |dim-1>.  Everything the
perturbative formulas elsewhere in the package are checked against lives here:
ladder and quadrature matrices, coherent states, the anharmonic Hamiltonian and
exact Heisenberg evolution through an eigendecomposition.

Conventions: hbar = omega = mass = 1, a|n> = sqrt(n)|n-1>,
X = (a + a^dag)/sqrt(2), Xdot = i(a^dag - a)/sqrt(2), H0 = a^dag a + 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg, special, stats


class InvalidDimensionError(ValueError):
    """Raised for a truncation dimension that cannot hold the request."""


class TruncationError(ValueError):
    """Raised when a state does not fit the truncated basis.

    ``required_dim`` estimates the dimension that would satisfy the bound.
    """

    def __init__(self, message: str, required_dim: int):
        super().__init__(message)
        self.required_dim = required_dim


class ContractError(ValueError):
    """Raised when an input violates an operation's documented contract."""


@dataclass(frozen=True)
class OscillatorSpec:
    """One anharmonic oscillator H = a^dag a + 1/2 + lam/(m 2^(m/2)) (a^dag + a)^m."""

    m: int
    lam: float
    dim: int = 64

    def __post_init__(self):
        if self.m < 4 or self.m % 2:
            raise ContractError(f"m must be an even integer >= 4, got {self.m}")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ContractError(f"lambda must be finite and >= 0, got {self.lam}")
        if self.dim < self.m + 4:
            raise InvalidDimensionError(f"dim must be >= m + 4 = {self.m + 4}, got {self.dim}")

    @property
    def lambda_prime(self) -> float:
        return self.lam / (self.m * 2 ** (self.m / 2))


@dataclass(frozen=True)
class FockState:
    """Normalized state vector on the truncated number basis."""

    amp: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=complex)
        if amp.ndim != 1 or amp.size < 1:
            raise InvalidDimensionError("state amplitudes must be a non-empty vector")
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise ContractError("zero vector is not a state")
        object.__setattr__(self, "amp", amp / norm)

    @property
    def dim(self) -> int:
        return self.amp.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amp) ** 2


def ladder_ops(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation matrices (a, a^dag) on ``dim`` levels."""
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T.copy()


def number_op(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def quadratures(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Position-like X and momentum-like Xdot quadratures."""
    a, ad = ladder_ops(dim)
    return (a + ad) / np.sqrt(2), 1j * (ad - a) / np.sqrt(2)


def free_hamiltonian(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float) + 0.5).astype(complex)


def ladder_monomial(p: int, q: int, dim: int) -> np.ndarray:
    """Matrix of a^dag^p a^q.

    Built directly from matrix elements, so every entry inside the basis is exact:
    truncation only discards amplitude that would leave the basis.
    """
    if p < 0 or q < 0:
        raise ContractError("powers must be non-negative")
    out = np.zeros((dim, dim), dtype=complex)
    n = np.arange(q, dim)
    k = n - q + p
    keep = k < dim
    n, k = n[keep], k[keep]
    logs = 0.5 * (special.gammaln(n + 1) + special.gammaln(k + 1)) - special.gammaln(n - q + 1)
    out[k, n] = np.exp(logs)
    return out


def interior(M: np.ndarray, margin: int = 1) -> np.ndarray:
    """Drop the top ``margin`` levels, where truncation artifacts live."""
    if margin <= 0:
        return M
    return M[:-margin, :-margin]


def default_dim(alpha_mag: float = 0.0, m: int = 4) -> int:
    return max(4 * math.ceil(alpha_mag**2) + 20, m + 16)


def poisson_tail(mean: float, dim: int) -> float:
    """Poisson mass on levels >= dim."""
    if mean == 0:
        return 0.0
    return float(stats.poisson.sf(dim - 1, mean))


def required_dim(mean: float, tail_bound: float) -> int:
    """Smallest dim whose Poisson tail is below ``tail_bound``."""
    if mean == 0:
        return 2
    dim = max(2, int(mean) + 1)
    while poisson_tail(mean, dim) > tail_bound:
        dim += max(1, dim // 8)
    while dim > 2 and poisson_tail(mean, dim - 1) <= tail_bound:
        dim -= 1
    return dim


def coherent_state(
    alpha_mag: float, theta: float = 0.0, dim: Optional[int] = None, tail_bound: float = 1e-12
) -> FockState:
    """Coherent state |alpha> with alpha = alpha_mag e^{i theta}, truncated and renormalized."""
    if alpha_mag < 0 or not np.isfinite(alpha_mag):
        raise ContractError(f"alpha_mag must be finite and >= 0, got {alpha_mag}")
    mean = alpha_mag**2
    if dim is None:
        dim = max(default_dim(alpha_mag), required_dim(mean, tail_bound))
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    tail = poisson_tail(mean, dim)
    if tail > tail_bound:
        need = required_dim(mean, tail_bound)
        raise TruncationError(
            f"Poisson tail {tail:.3e} beyond dim={dim} exceeds bound {tail_bound:.1e}; need dim >= {need}",
            need,
        )
    n = np.arange(dim)
    if alpha_mag == 0:
        amp = np.zeros(dim, dtype=complex)
        amp[0] = 1.0
    else:
        # log-space keeps large |alpha| and large n finite
        logmag = -mean / 2 + n * math.log(alpha_mag) - 0.5 * special.gammaln(n + 1)
        amp = np.exp(logmag) * np.exp(1j * theta * n)
    return FockState(amp, tail_mass=tail)


def number_state(n: int, dim: int) -> FockState:
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"level {n} outside basis of size {dim}")
    amp = np.zeros(dim, dtype=complex)
    amp[n] = 1.0
    return FockState(amp)


def hamiltonian(spec: OscillatorSpec) -> np.ndarray:
    """Anharmonic Hamiltonian, with (a^dag + a)^m taken by repeated matrix products."""
    a, ad = ladder_ops(spec.dim)
    x = a + ad
    H = free_hamiltonian(spec.dim) + spec.lambda_prime * np.linalg.matrix_power(x, spec.m)
    return 0.5 * (H + H.conj().T)


def is_hermitian(M: np.ndarray, tol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.max(np.abs(M))))
    return bool(np.max(np.abs(M - M.conj().T)) <= tol * scale)


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian matrix, reusable across times."""

    energies: np.ndarray
    vectors: np.ndarray

    @classmethod
    def of(cls, H: np.ndarray) -> "Spectrum":
        if not is_hermitian(H, 1e-10):
            raise ContractError("Hamiltonian must be Hermitian")
        try:
            w, V = linalg.eigh(H)
        except linalg.LinAlgError as exc:
            cond = np.linalg.cond(H)
            raise np.linalg.LinAlgError(f"eigendecomposition failed (condition number {cond:.3e})") from exc
        return cls(w, V)

    def propagator(self, t: float) -> np.ndarray:
        """e^{-iHt}."""
        return (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T

    def heisenberg(self, O: np.ndarray, t: float) -> np.ndarray:
        U = self.propagator(t)
        return U.conj().T @ O @ U


def heisenberg_exact(H: np.ndarray, O: np.ndarray, t: float) -> np.ndarray:
    """e^{iHt} O e^{-iHt} by exact diagonalization."""
    return Spectrum.of(H).heisenberg(O, t)


def evolve_state(H: np.ndarray, psi: FockState, t: float) -> FockState:
    return FockState(Spectrum.of(H).propagator(t) @ psi.amp, tail_mass=psi.tail_mass)


def expectation(O: np.ndarray, psi: FockState) -> complex:
    if O.shape != (psi.dim, psi.dim):
        raise InvalidDimensionError(f"operator shape {O.shape} does not match state dim {psi.dim}")
    return complex(np.vdot(psi.amp, O @ psi.amp))


def variance(O: np.ndarray, psi: FockState) -> float:
    """<O^2> - <O>^2 for Hermitian O."""
    if not is_hermitian(O, 1e-10):
        raise ContractError("variance needs a Hermitian operator")
    v = O @ psi.amp
    mean = np.vdot(psi.amp, v).real
    return float(np.vdot(v, v).real - mean**2)
