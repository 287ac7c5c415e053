"""Classical anharmonic trajectories for x'' + x + lam x^(m-1) = 0.

Perturbative solutions are stored as trigonometric tables: each entry
(kind, h, s, c) stands for c t^s cos(h t) or c t^s sin(h t).  The quartic case
is carried to second order in lam, the sextic and octic cases to first order.
Terms with s > 0 are secular; :func:`tuck_in` folds them into a shifted
frequency.  :func:`rk4_oracle` integrates the equation of motion directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .fock import ContractError

F = Fraction
Term = Tuple[str, int, int, int]  # (kind, harmonic, power of t, integer coefficient)


class UnsupportedCaseError(ContractError):
    """Raised for a parameter combination the closed forms do not cover."""


class StepSizeError(RuntimeError):
    """Raised when the integrator violates its energy-drift bound."""


class NotTuckableError(ValueError):
    """Raised when secular terms cannot be absorbed into a frequency shift."""


# --- coefficient tables --------------------------------------------------
# Each table lists, for the monomial x0^(n-i) v0^i, its prefactor and terms.

_QUARTIC_1: Tuple[Tuple[Fraction, Tuple[Term, ...]], ...] = (
    (F(-1, 32), (("cos", 1, 0, 1), ("cos", 3, 0, -1), ("sin", 1, 1, 12))),
    (F(3, 32), (("sin", 3, 0, 1), ("sin", 1, 0, -7), ("cos", 1, 1, 4))),
    (F(-3, 32), (("cos", 3, 0, 1), ("cos", 1, 0, -1), ("sin", 1, 1, 4))),
    (F(-1, 32), (("sin", 3, 0, 1), ("sin", 1, 0, 9), ("cos", 1, 1, -12))),
)

_QUARTIC_2 = (
    (F(1, 1024), (("cos", 5, 0, 1), ("sin", 3, 1, -36), ("cos", 3, 0, -24),
                  ("cos", 1, 2, -72), ("sin", 1, 1, 96), ("cos", 1, 0, 23))),
    (F(1, 1024), (("sin", 5, 0, 5), ("cos", 3, 1, 108), ("sin", 3, 0, -132),
                  ("sin", 1, 2, -72), ("sin", 1, 0, 599), ("cos", 1, 1, -336))),
    (F(2, 1024), (("cos", 5, 0, -5), ("cos", 3, 0, 90), ("sin", 3, 1, 36),
                  ("cos", 1, 2, -72), ("cos", 1, 0, -85), ("sin", 1, 1, 264))),
    (F(2, 1024), (("sin", 5, 0, -5), ("cos", 3, 1, 36), ("sin", 3, 0, 6),
                  ("sin", 1, 2, -72), ("sin", 1, 0, 427), ("cos", 1, 1, -456))),
    (F(1, 1024), (("cos", 5, 0, 5), ("sin", 3, 1, 108), ("cos", 3, 0, 108),
                  ("cos", 1, 2, -72), ("cos", 1, 0, -113), ("sin", 1, 1, 240))),
    (F(1, 1024), (("sin", 5, 0, 1), ("cos", 3, 1, -36), ("sin", 3, 0, 48),
                  ("sin", 1, 2, -72), ("sin", 1, 0, 271), ("cos", 1, 1, -384))),
)

_SEXTIC_1 = (
    (F(1, 384), (("cos", 5, 0, 1), ("cos", 3, 0, 15), ("cos", 1, 0, -16), ("sin", 1, 1, -120))),
    (F(1, 384), (("sin", 5, 0, 5), ("sin", 3, 0, 45), ("sin", 1, 0, -280), ("cos", 1, 1, 120))),
    (F(2, 384), (("cos", 5, 0, -5), ("cos", 3, 0, -15), ("cos", 1, 0, 20), ("sin", 1, 1, -120))),
    (F(2, 384), (("sin", 5, 0, -5), ("sin", 3, 0, 15), ("sin", 1, 0, -140), ("cos", 1, 1, 120))),
    (F(1, 384), (("cos", 5, 0, 5), ("cos", 3, 0, -45), ("cos", 1, 0, 40), ("sin", 1, 1, -120))),
    (F(1, 384), (("sin", 5, 0, 1), ("sin", 3, 0, -15), ("sin", 1, 0, -80), ("cos", 1, 1, 120))),
)


def _octic_table(dot_harmonic: int):
    return (
        (F(1, 3072), (("cos", 7, 0, 1), ("cos", 5, 0, 14), ("cos", 3, 0, 126),
                      ("cos", 1, 0, -141), ("sin", 1, 1, -840))),
        (F(1, 3072), (("sin", 7, 0, 7), ("sin", 5, 0, 70), ("sin", dot_harmonic, 0, 378),
                      ("sin", 1, 0, -2373), ("cos", 1, 1, 840))),
        (F(1, 3072), (("cos", 7, 0, -21), ("cos", 5, 0, -126), ("cos", 3, 0, -126),
                      ("cos", 1, 0, 273), ("sin", 1, 1, -2520))),
        (F(1, 3072), (("sin", 7, 0, -35), ("sin", 5, 0, -70), ("sin", 3, 0, 630),
                      ("sin", 1, 0, -3815), ("cos", 1, 1, 2520))),
        (F(1, 3072), (("cos", 7, 0, 35), ("cos", 5, 0, -70), ("cos", 3, 0, -630),
                      ("cos", 1, 0, 665), ("sin", 1, 1, -2520))),
        (F(1, 3072), (("sin", 7, 0, 21), ("sin", 5, 0, -126), ("sin", 3, 0, 126),
                      ("sin", 1, 0, -2415), ("cos", 1, 1, 2520))),
        (F(1, 3072), (("cos", 7, 0, -7), ("cos", 5, 0, 70), ("cos", 3, 0, -378),
                      ("cos", 1, 0, 315), ("sin", 1, 1, -840))),
        (F(1, 3072), (("sin", 7, 0, -1), ("sin", 5, 0, 14), ("sin", 3, 0, -126),
                      ("sin", 1, 0, -525), ("cos", 1, 1, 840))),
    )


# the x0^6 v0 entry repeats sin t; sin 3t is what the equation of motion needs
_OCTIC_1 = _octic_table(3)
_OCTIC_1_PRINTED = _octic_table(1)


def _eval_terms(terms: Sequence[Term], t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    for kind, h, s, c in terms:
        trig = np.cos if kind == "cos" else np.sin
        out = out + c * t**s * trig(h * t)
    return out


def _eval_table(table, x0: float, v0: float, t) -> np.ndarray:
    n = len(table) - 1
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for i, (pref, terms) in enumerate(table):
        mono = x0 ** (n - i) * v0**i
        if mono:
            out = out + float(pref) * mono * _eval_terms(terms, t)
    return out


def _zeroth(x0: float, v0: float, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return x0 * np.cos(t) + v0 * np.sin(t)


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


# --- shifted frequencies --------------------------------------------------


def quartic_omega(A: float, lam: float, order: int = 2) -> float:
    """w' = 1 + (3/8) lam A^2 - (21/256) lam^2 A^4, truncated at ``order``."""
    w = 1.0
    if order >= 1:
        w += 3 / 8 * lam * A**2
    if order >= 2:
        w -= 21 / 256 * lam**2 * A**4
    return w


def sextic_omega(a: float, lam: float) -> float:
    return 1 + 5 / 16 * lam * a**4


def octic_omega(b: float, lam: float) -> float:
    return 1 + 35 / 128 * lam * b**6


# --- perturbative trajectories --------------------------------------------


def quartic_classical(x0: float, v0: float, lam: float, t, order: int = 2, renormalized: bool = False):
    """Quartic trajectory through ``order`` in lam.

    The renormalized form needs x(0) = A, x'(0) = 0 and reads
    A cos w't - (lam A^3/32)(cos w't - cos 3w't)
    + (lam^2 A^5/1024)(cos 5w't - 24 cos 3w't + 23 cos w't).
    """
    if order not in (0, 1, 2):
        raise ContractError(f"order must be 0, 1 or 2, got {order}")
    t = np.asarray(t, dtype=float)
    if renormalized:
        if v0 != 0:
            raise UnsupportedCaseError("the renormalized quartic solution is defined for v0 = 0 only")
        A = x0
        wt = quartic_omega(A, lam, order) * t
        x = A * np.cos(wt)
        if order >= 1:
            x = x - lam * A**3 / 32 * (np.cos(wt) - np.cos(3 * wt))
        if order >= 2:
            x = x + lam**2 * A**5 / 1024 * (np.cos(5 * wt) - 24 * np.cos(3 * wt) + 23 * np.cos(wt))
        return _scalar(x)
    x = _zeroth(x0, v0, t)
    if order >= 1:
        x = x + lam * _eval_table(_QUARTIC_1, x0, v0, t)
    if order >= 2:
        x = x + lam**2 * _eval_table(_QUARTIC_2, x0, v0, t)
    return _scalar(x)


def sextic_classical(x0: float, v0: float, lam: float, t, renormalized: bool = False):
    """First-order sextic trajectory; renormalized form needs v0 = 0."""
    t = np.asarray(t, dtype=float)
    if renormalized:
        if v0 != 0:
            raise UnsupportedCaseError("the renormalized sextic solution is defined for v0 = 0 only")
        a = x0
        x = a * np.cos(sextic_omega(a, lam) * t) + lam * a**5 * (
            -np.cos(t) / 24 + 5 * np.cos(3 * t) / 128 + np.cos(5 * t) / 384)
        return _scalar(x)
    return _scalar(_zeroth(x0, v0, t) + lam * _eval_table(_SEXTIC_1, x0, v0, t))


def octic_classical(x0: float, v0: float, lam: float, t, renormalized: bool = False, variant: str = "corrected"):
    """First-order octic trajectory; renormalized form needs v0 = 0.

    ``variant="printed"`` keeps a second sin t in the x0^6 v0 entry where the
    corrected table has sin 3t.
    """
    if variant not in ("corrected", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    t = np.asarray(t, dtype=float)
    if renormalized:
        if v0 != 0:
            raise UnsupportedCaseError("the renormalized octic solution is defined for v0 = 0 only")
        b = x0
        x = b * np.cos(octic_omega(b, lam) * t) + lam * b**7 / 3072 * (
            -141 * np.cos(t) + 126 * np.cos(3 * t) + 14 * np.cos(5 * t) + np.cos(7 * t))
        return _scalar(x)
    table = _OCTIC_1 if variant == "corrected" else _OCTIC_1_PRINTED
    return _scalar(_zeroth(x0, v0, t) + lam * _eval_table(table, x0, v0, t))


def classical(m: int, x0: float, v0: float, lam: float, t, renormalized: bool = False):
    """Highest available order for m = 4, 6 or 8."""
    if m == 4:
        return quartic_classical(x0, v0, lam, t, 2, renormalized)
    if m == 6:
        return sextic_classical(x0, v0, lam, t, renormalized)
    if m == 8:
        return octic_classical(x0, v0, lam, t, renormalized)
    raise UnsupportedCaseError(f"closed forms exist for m in (4, 6, 8), got {m}")


def shifted_frequency(m: int, A: float, lam: float) -> float:
    if m == 4:
        return quartic_omega(A, lam)
    if m == 6:
        return sextic_omega(A, lam)
    if m == 8:
        return octic_omega(A, lam)
    raise UnsupportedCaseError(f"closed forms exist for m in (4, 6, 8), got {m}")


# --- numerical oracle -----------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.t.ndim != 1 or self.t.shape != self.x.shape:
            raise ContractError("t and x must be matching 1-d arrays")
        if np.any(np.diff(self.t) <= 0):
            raise ContractError("sample grid must be strictly increasing")

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.t, self.x])


def energy(m: int, lam: float, x, v):
    return 0.5 * v**2 + 0.5 * x**2 + lam * x**m / m


DRIFT_LIMIT = 1e-8


def rk4_oracle(
    m: int, x0: float, v0: float, lam: float, t_end: float, dt: float = 1e-3,
    drift_limit: float = DRIFT_LIMIT,
) -> Trajectory:
    """Classical RK4 for x'' = -x - lam x^(m-1) on a uniform grid."""
    if m < 2 or m % 2:
        raise ContractError(f"m must be an even integer >= 2, got {m}")
    if not (dt > 0 and t_end > 0):
        raise ContractError("dt and t_end must be positive")
    n = int(round(t_end / dt))
    dt = t_end / n
    ys = np.empty((n + 1, 2))
    y = np.array([x0, v0], dtype=float)
    ys[0] = y

    def f(y):
        return np.array([y[1], -y[0] - lam * y[0] ** (m - 1)])

    for i in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i + 1] = y
    t = np.arange(n + 1) * dt
    E = energy(m, lam, ys[:, 0], ys[:, 1])
    drift = float(np.max(np.abs(E - E[0])) / E[0]) if E[0] > 0 else 0.0
    if drift > drift_limit:
        raise StepSizeError(f"relative energy drift {drift:.2e} exceeds {drift_limit:.0e}; reduce dt")
    meta = {"m": m, "lam": lam, "x0": x0, "v0": v0, "dt": dt, "drift": drift, "order": "rk4"}
    return Trajectory(t, ys[:, 0].copy(), ys[:, 1].copy(), meta)


def zero_crossing_frequency(t: np.ndarray, x: np.ndarray) -> float:
    """Angular frequency from linearly interpolated sign changes of x."""
    idx = np.where(np.sign(x[:-1]) * np.sign(x[1:]) < 0)[0]
    if idx.size < 3:
        raise ValueError("need at least three zero crossings")
    tz = t[idx] - x[idx] * (t[idx + 1] - t[idx]) / (x[idx + 1] - x[idx])
    # fit a line through crossing times; adjacent crossings are half a period apart
    half = np.polyfit(np.arange(tz.size), tz, 1)[0]
    return float(np.pi / half)


# --- tucking in -----------------------------------------------------------

Key = Tuple[str, int, int]  # (kind, harmonic, power of t)


@dataclass(frozen=True)
class SecularSeries:
    """x(t) = sum_j lam^j sum_{key} c t^s trig(h t); orders[j] maps key -> coefficient."""

    orders: Tuple[Dict[Key, Fraction], ...]

    def __post_init__(self):
        clean = tuple({k: F(v) for k, v in o.items() if v != 0} for o in self.orders)
        object.__setattr__(self, "orders", clean)

    @property
    def order(self) -> int:
        return len(self.orders) - 1

    def is_secular_free(self) -> bool:
        return all(s == 0 for o in self.orders for (_, _, s) in o)

    def evaluate(self, lam: float, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for j, o in enumerate(self.orders):
            out = out + lam**j * _eval_terms([(k, h, s, float(c)) for (k, h, s), c in o.items()], t)
        return _scalar(out)


@dataclass(frozen=True)
class RenormalizedSeries:
    """x(t) = sum_j lam^j P_j(w t) with w = sum_j lam^j omega[j], omega[0] = 1."""

    omega: Tuple[Fraction, ...]
    periodic: Tuple[Dict[Tuple[str, int], Fraction], ...]

    @property
    def order(self) -> int:
        return len(self.periodic) - 1

    def frequency(self, lam: float) -> float:
        return float(sum(float(w) * lam**j for j, w in enumerate(self.omega)))

    def evaluate(self, lam: float, t) -> np.ndarray:
        wt = self.frequency(lam) * np.asarray(t, dtype=float)
        out = np.zeros_like(wt)
        for j, P in enumerate(self.periodic):
            for (kind, h), c in P.items():
                out = out + lam**j * float(c) * (np.cos if kind == "cos" else np.sin)(h * wt)
        return _scalar(out)

    def expand(self, order: Optional[int] = None) -> SecularSeries:
        """Taylor re-expansion in lam back to a secular series."""
        N = self.order if order is None else order
        return SecularSeries(tuple(_expand(self.omega, self.periodic, N)))


def _derivative(kind: str, n: int) -> Tuple[str, int]:
    """n-th derivative of cos/sin(u) as (kind, sign)."""
    cycle = [("cos", 1), ("sin", -1), ("cos", -1), ("sin", 1)] if kind == "cos" else \
        [("sin", 1), ("cos", 1), ("sin", -1), ("cos", -1)]
    return cycle[n % 4]


def _delta_powers(omega: Sequence[Fraction], N: int) -> List[List[Fraction]]:
    """Coefficient lists (in lam) of delta^n, delta = w - 1, for n = 0..N."""
    delta = [F(0)] + [F(w) for w in omega[1:N + 1]] + [F(0)] * max(0, N + 1 - len(omega))
    delta = delta[:N + 1]
    out = [[F(1)] + [F(0)] * N]
    for _ in range(N):
        prev = out[-1]
        nxt = [F(0)] * (N + 1)
        for i, a in enumerate(prev):
            if a:
                for j, b in enumerate(delta):
                    if b and i + j <= N:
                        nxt[i + j] += a * b
        out.append(nxt)
    return out


def _expand(omega, periodic, N: int) -> List[Dict[Key, Fraction]]:
    # trig(h w t) = sum_n (h delta t)^n / n! trig^(n)(h t)
    dp = _delta_powers(omega, N)
    out: List[Dict[Key, Fraction]] = [dict() for _ in range(N + 1)]
    for j, P in enumerate(periodic[:N + 1]):
        for (kind, h), c in P.items():
            for n in range(N - j + 1):
                dkind, sign = _derivative(kind, n)
                for k in range(N - j + 1):
                    coef = dp[n][k]
                    if coef:
                        key = (dkind, h, n)
                        out[j + k][key] = out[j + k].get(key, F(0)) + c * sign * F(h) ** n * coef / factorial(n)
    return [{k: v for k, v in o.items() if v != 0} for o in out]


def tuck_in(series: SecularSeries) -> RenormalizedSeries:
    """Absorb secular terms into a frequency shift, order by order in lam.

    At order j the input minus the re-expansion of what is already known must be
    w_j t P_0'(t) plus a secular-free remainder; that fixes w_j and P_j.
    """
    N = series.order
    P0 = series.orders[0]
    if any(s or h != 1 for (_, h, s) in P0):
        raise NotTuckableError("zeroth order must be a pure fundamental")
    ca, sa = P0.get(("cos", 1, 0), F(0)), P0.get(("sin", 1, 0), F(0))
    omega: List[Fraction] = [F(1)]
    periodic: List[Dict[Tuple[str, int], Fraction]] = [{(k, h): c for (k, h, _), c in P0.items()}]
    for j in range(1, N + 1):
        known = _expand(omega + [F(0)], periodic + [{}], j)[j]
        resid = dict(series.orders[j])
        for k, v in known.items():
            resid[k] = resid.get(k, F(0)) - v
        # P_0'(t) = -ca sin t + sa cos t
        cs, cc = resid.pop(("sin", 1, 1), F(0)), resid.pop(("cos", 1, 1), F(0))
        if ca == 0 and sa == 0:
            wj = F(0)
        else:
            wj = -cs / ca if ca != 0 else cc / sa
            if cs != -wj * ca or cc != wj * sa:
                raise NotTuckableError(f"order {j}: t sin t and t cos t terms imply different shifts")
        left = {k: v for k, v in resid.items() if v != 0 and k[2] != 0}
        if left:
            raise NotTuckableError(f"order {j}: secular terms {sorted(left)} are not a frequency shift")
        omega.append(wj)
        periodic.append({(k, h): v for (k, h, _), v in resid.items() if v != 0})
    return RenormalizedSeries(tuple(omega), tuple(periodic))


def _series_from_tables(tables, x0: Fraction, v0: Fraction, orders: Sequence[int]) -> SecularSeries:
    out: List[Dict[Key, Fraction]] = [{("cos", 1, 0): x0, ("sin", 1, 0): v0}]
    top = max(orders)
    out += [dict() for _ in range(top)]
    for j, table in zip(orders, tables):
        n = len(table) - 1
        for i, (pref, terms) in enumerate(table):
            mono = x0 ** (n - i) * v0**i
            for kind, h, s, c in terms:
                key = (kind, h, s)
                out[j][key] = out[j].get(key, F(0)) + pref * mono * c
    return SecularSeries(tuple(out))


def quartic_series(x0, v0=0, order: int = 2) -> SecularSeries:
    """Exact-rational secular series of the quartic solution."""
    tables = (_QUARTIC_1, _QUARTIC_2)[:order]
    return _series_from_tables(tables, F(x0), F(v0), list(range(1, order + 1)))


def sextic_series(x0, v0=0) -> SecularSeries:
    return _series_from_tables((_SEXTIC_1,), F(x0), F(v0), [1])


def octic_series(x0, v0=0) -> SecularSeries:
    return _series_from_tables((_OCTIC_1,), F(x0), F(v0), [1])
