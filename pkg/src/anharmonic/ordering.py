"""Exact normal ordering of polynomials in a and a^dag.

An :class:`OperatorPoly` maps (p, q) -> coefficient for the monomial a^dag^p a^q,
always stored normal ordered.  Coefficients are exact (``int`` or
``fractions.Fraction``); floats only appear in :meth:`OperatorPoly.to_matrix`.

``colon_power(m)`` is :(a^dag + a)^m:, the binomial expansion with every a^dag
moved left and no commutators picked up.  ``normal_order_power(m)`` is the true
normal-ordered form of (a^dag + a)^m, obtained from the closed expansion

    (a^dag + a)^m = sum_{r even} t_r C(m, r) :(a^dag + a)^(m - r):,   t_r = (r - 1)!!

and ``brute_force_normal_order(m)`` recomputes it independently by pushing
annihilators through creators one at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from numbers import Rational
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from .fock import ContractError, ladder_monomial

Key = Tuple[int, int]

BRUTE_FORCE_GUARD = 16


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


@dataclass(frozen=True)
class OperatorPoly:
    terms: Mapping[Key, Rational] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Key, Rational] = {}
        for (p, q), c in dict(self.terms).items():
            if p < 0 or q < 0:
                raise ContractError(f"negative power in term {(p, q)}")
            if c != 0:
                clean[(int(p), int(q))] = _norm(c)
        object.__setattr__(self, "terms", clean)

    # constructors
    @classmethod
    def identity(cls) -> "OperatorPoly":
        return cls({(0, 0): 1})

    @classmethod
    def a(cls) -> "OperatorPoly":
        return cls({(0, 1): 1})

    @classmethod
    def adag(cls) -> "OperatorPoly":
        return cls({(1, 0): 1})

    # algebra
    def __add__(self, other: "OperatorPoly") -> "OperatorPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return OperatorPoly(out)

    def __sub__(self, other: "OperatorPoly") -> "OperatorPoly":
        return self + other.scale(-1)

    def scale(self, c) -> "OperatorPoly":
        return OperatorPoly({k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c) -> "OperatorPoly":
        return self.scale(c)

    def __mul__(self, other):
        if not isinstance(other, OperatorPoly):
            return self.scale(other)
        out: Dict[Key, Rational] = {}
        for (p, q), c1 in self.terms.items():
            for (r, s), c2 in other.terms.items():
                # a^q a^dag^r = sum_k C(q,k) C(r,k) k! a^dag^(r-k) a^(q-k)
                for k in range(min(q, r) + 1):
                    key = (p + r - k, q + s - k)
                    out[key] = out.get(key, 0) + c1 * c2 * comb(q, k) * comb(r, k) * factorial(k)
        return OperatorPoly(out)

    def __pow__(self, n: int) -> "OperatorPoly":
        out = OperatorPoly.identity()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, OperatorPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def adjoint(self) -> "OperatorPoly":
        return OperatorPoly({(q, p): c for (p, q), c in self.terms.items()})

    def is_self_adjoint(self) -> bool:
        return self == self.adjoint()

    @property
    def degree(self) -> int:
        return max((p + q for p, q in self.terms), default=0)

    def coeff(self, p: int, q: int) -> Rational:
        return self.terms.get((p, q), 0)

    def to_matrix(self, dim: int) -> np.ndarray:
        out = np.zeros((dim, dim), dtype=complex)
        for (p, q), c in self.terms.items():
            out += float(c) * ladder_monomial(p, q, dim)
        return out

    def sorted_terms(self) -> Tuple[Tuple[Key, Rational], ...]:
        return tuple(sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), -kv[0][0])))

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in self.sorted_terms())
        return f"OperatorPoly({{{body}}})"


def falling_factorial(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1); defined for every integer n, including negative."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


def t_coeff(r: int) -> int:
    """t_r = r! / (2^(r/2) (r/2)!) = (r-1)!! for even r."""
    if r < 0 or r % 2:
        raise ValueError(f"t_r is defined for even r >= 0, got {r}")
    out = 1
    for k in range(r - 1, 0, -2):
        out *= k
    return out


def colon_power(m: int) -> OperatorPoly:
    """:(a^dag + a)^m: = sum_r C(m, r) a^dag^r a^(m - r)."""
    if m < 0:
        raise ContractError(f"m must be >= 0, got {m}")
    return OperatorPoly({(r, m - r): comb(m, r) for r in range(m + 1)})


def colon_coefficients(m: int) -> Tuple[int, ...]:
    """Coefficients c_j of (a^dag + a)^m = sum_j c_j :(a^dag + a)^(m - 2j):."""
    if m < 0:
        raise ContractError(f"m must be >= 0, got {m}")
    return tuple(t_coeff(r) * comb(m, r) for r in range(0, m + 1, 2))


def normal_order_power(m: int) -> OperatorPoly:
    """Normal-ordered (a^dag + a)^m from the closed t_r expansion."""
    out = OperatorPoly()
    for j, c in enumerate(colon_coefficients(m)):
        out = out + colon_power(m - 2 * j).scale(c)
    return out


def brute_force_normal_order(m: int, guard: int = BRUTE_FORCE_GUARD) -> OperatorPoly:
    """Normal-ordered (a^dag + a)^m by repeated right multiplication.

    Each step multiplies by (a^dag + a) and restores normal order with the single
    rewrite a^q a^dag = a^dag a^q + q a^(q-1).  No closed form is used.
    """
    if m < 0:
        raise ContractError(f"m must be >= 0, got {m}")
    if m > guard:
        raise ValueError(f"brute-force ordering refused for m={m} > guard {guard}")
    terms: Dict[Key, int] = {(0, 0): 1}
    for _ in range(m):
        nxt: Dict[Key, int] = {}
        for (p, q), c in terms.items():
            # times a: stays ordered
            nxt[(p, q + 1)] = nxt.get((p, q + 1), 0) + c
            # times a^dag: a^dag^p (a^q a^dag) = a^dag^(p+1) a^q + q a^dag^p a^(q-1)
            nxt[(p + 1, q)] = nxt.get((p + 1, q), 0) + c
            if q:
                nxt[(p, q - 1)] = nxt.get((p, q - 1), 0) + q * c
        terms = nxt
    return OperatorPoly(terms)


def colon_decompose(poly: OperatorPoly) -> Dict[int, Rational]:
    """Write a polynomial as sum_k c_k :(a^dag + a)^k:, if it has that form."""
    rest = OperatorPoly(poly.terms)
    out: Dict[int, Rational] = {}
    while rest.terms:
        k = rest.degree
        lead = rest.coeff(0, k)
        if lead == 0:
            raise ContractError("polynomial is not a combination of colon powers")
        out[k] = _norm(Fraction(lead))
        rest = rest - colon_power(k).scale(lead)
    return dict(sorted(out.items(), reverse=True))


def theorem1_step(p: OperatorPoly, m: int) -> OperatorPoly:
    """:(a^dag + a)^m: (a^dag + a) = :(a^dag + a)^(m+1): + m :(a^dag + a)^(m-1):."""
    if p != colon_power(m):
        raise ContractError(f"theorem1_step expects colon_power({m})")
    out = colon_power(m + 1)
    if m > 0:
        out = out + colon_power(m - 1).scale(m)
    return out


def normal_order_power_by_induction(m: int) -> Iterable[OperatorPoly]:
    """Yield (a^dag + a)^k normal ordered for k = 0..m, each step via theorem1_step."""
    current = {0: 1}
    yield OperatorPoly.identity()
    for _ in range(m):
        nxt: Dict[int, Rational] = {}
        for k, c in current.items():
            for kk, cc in colon_decompose(theorem1_step(colon_power(k), k)).items():
                nxt[kk] = nxt.get(kk, 0) + c * cc
        current = nxt
        out = OperatorPoly()
        for k, c in current.items():
            out = out + colon_power(k).scale(c)
        yield out


def number_expectation(p: OperatorPoly, n: int) -> Rational:
    """<n|p|n>: only balanced terms a^dag^k a^k survive, each giving n!/(n-k)!."""
    if n < 0:
        raise ContractError(f"n must be >= 0, got {n}")
    total = 0
    for (i, j), c in p.terms.items():
        if i == j:
            total += c * falling_factorial(n, i)
    return _norm(Fraction(total))
