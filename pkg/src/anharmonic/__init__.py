"""Perturbative operator solutions of quantum anharmonic oscillators.

Closed forms for H = a^dag a + 1/2 + lam/(m 2^(m/2)) (a^dag + a)^m and the field
observables derived from them, each paired with an independent numerical check.
"""

from importlib.metadata import PackageNotFoundError, version

from .fock import ContractError, InvalidDimensionError, OscillatorSpec, TruncationError

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover - source checkout without install
    __version__ = "0.0.0"

__all__ = [
    "ContractError",
    "InvalidDimensionError",
    "OscillatorSpec",
    "TruncationError",
    "__version__",
]
