"""Oracle-comparison suites behind the ``verify`` subcommand.

Each suite compares closed forms against an independent route (brute-force
ordering, exact diagonalization, the from-scratch phase pipeline, RK4) and
returns measured numbers next to a pass flag.  Reports contain no timings or
other run-dependent values, so identical invocations print identical text.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from . import classical, evolution, geometry, observables, ordering, spectra
from .fock import OscillatorSpec, Spectrum, coherent_state, hamiltonian, ladder_ops, quadratures

SEED = 20240521


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class SuiteReport:
    number: int
    title: str
    checks: Tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> List[str]:
        out = [f"{'PASS' if self.passed else 'FAIL'}  {self.number}. {self.title}"]
        for c in self.checks:
            tail = f"  [{c.detail}]" if c.detail else ""
            out.append(f"    {'ok  ' if c.passed else 'FAIL'}  {c.name}{tail}")
        return out


def slope(r_big: float, r_small: float) -> float:
    """log2 of the residual ratio under lambda halving."""
    return float(np.log2(abs(r_big) / abs(r_small)))


# 1 -----------------------------------------------------------------------------

EXPANSIONS = {
    1: (1,), 2: (1, 1), 3: (1, 3), 4: (1, 6, 3), 5: (1, 10, 15), 6: (1, 15, 45, 15),
    7: (1, 21, 105, 105), 8: (1, 28, 210, 420, 105), 9: (1, 36, 378, 1260, 945),
}


def suite_ordering(max_m: int = 12) -> SuiteReport:
    bad = [m for m in range(max_m + 1)
           if ordering.normal_order_power(m) != ordering.brute_force_normal_order(m)]
    induct = list(ordering.normal_order_power_by_induction(max_m))
    bad_ind = [m for m in range(max_m + 1) if induct[m] != ordering.normal_order_power(m)]
    table = [m for m, c in EXPANSIONS.items() if ordering.colon_coefficients(m) != c]
    return SuiteReport(1, "normal ordering", (
        Check(f"closed form == brute force, m=0..{max_m}", not bad, f"mismatch m={bad}" if bad else "exact"),
        Check(f"step-by-step induction == closed form, m=0..{max_m}", not bad_ind),
        Check("expansion table m=1..9", not table, f"mismatch m={table}" if table else "verbatim"),
    ))


# 2 -----------------------------------------------------------------------------

SPECTRA_LAMBDAS = (1e-2, 5e-3)


def spectra_slopes(m: int, n_max: int = 6, dim: int = 128, lams: Sequence[float] = SPECTRA_LAMBDAS) -> List[float]:
    """Slopes of spacing_n - (1 + lam <n|Omega_1|n>) for n = 0..n_max."""
    omega = spectra.freq_operator_first(m)
    res = []
    for lam in lams:
        sp = spectra.numerical_spacings(OscillatorSpec(m, lam, dim))
        res.append([sp[n] - (1 + lam * float(omega.at_level(n))) for n in range(n_max + 1)])
    return [slope(a, b) for a, b in zip(res[0], res[1])]


def quartic_second_order_slopes(n_max: int = 6, dim: int = 128, lams=SPECTRA_LAMBDAS) -> List[float]:
    res = []
    for lam in lams:
        sp = spectra.numerical_spacings(OscillatorSpec(4, lam, dim))
        row = []
        for n in range(1, n_max + 2):
            c = spectra.quartic_spacing_coeffs(n)
            row.append(sp[n - 1] - (float(c[0]) + lam * float(c[1]) + lam**2 * float(c[2])))
        res.append(row)
    return [slope(a, b) for a, b in zip(res[0], res[1])]


def suite_spectra() -> SuiteReport:
    checks = []
    for m in (4, 6, 8, 10):
        s = spectra_slopes(m)
        ok = all(abs(x - 2.0) <= 0.2 for x in s)
        checks.append(Check(f"m={m} first-order slope 2.0 +- 0.2, n=0..6", ok,
                            "slopes " + " ".join(f"{x:.3f}" for x in s)))
    s2 = quartic_second_order_slopes()
    checks.append(Check("m=4 second-order slope 3.0 +- 0.3", all(abs(x - 3.0) <= 0.3 for x in s2),
                        "slopes " + " ".join(f"{x:.3f}" for x in s2)))
    return SuiteReport(2, "spectra vs diagonalization", tuple(checks))


# 3 -----------------------------------------------------------------------------


def suite_equivalence() -> SuiteReport:
    checks = []
    for m in (4, 6, 8, 10):
        big = spectra.freq_operator_first(m)
        small = spectra.mspt_omega_operator(m)
        diag = all(big.at_level(n) == spectra.first_order_coeff(m, n + 1) - spectra.first_order_coeff(m, n)
                   for n in range(m + 2))
        checks.append(Check(f"m={m}: Omega_1(H0) = [w_1(H0) + w_1(H0 + 1)]/2", spectra.average_map(small) == big))
        checks.append(Check(f"m={m}: <n|Omega_1|n> = E_(n+1) - E_n", diag))
    F = Fraction
    checks.append(Check("m=4: Omega_1 = (3/4)(H0 + 1/2), w_1 = (3/4) H0",
                        spectra.freq_operator_first(4).coeffs == (F(3, 8), F(3, 4))
                        and spectra.mspt_omega_operator(4).coeffs == (F(0), F(3, 4))))
    return SuiteReport(3, "frequency-operator equivalence", tuple(checks))


# 4 -----------------------------------------------------------------------------

EVOLUTION_CASES = {4: (1e-3, 5e-4), 6: (1e-4, 5e-5)}
EVOLUTION_TIMES = (1.0, 3.0, 5.0)
EVOLUTION_BLOCK = 8


def evolution_residual(m: int, lam: float, t: float, dim: int = 48, block: int = EVOLUTION_BLOCK) -> float:
    spec = OscillatorSpec(m, lam, dim)
    a, _ = ladder_ops(dim)
    exact = Spectrum.of(hamiltonian(spec)).heisenberg(a, t)
    diff = (evolution.a_first_order(spec, t) - exact)[:block, :block]
    return float(np.max(np.abs(diff)))


def suite_evolution() -> SuiteReport:
    checks = []
    for m, (l1, l2) in EVOLUTION_CASES.items():
        for t in EVOLUTION_TIMES:
            r = evolution_residual(m, l1, t) / evolution_residual(m, l2, t)
            checks.append(Check(f"m={m} t={t:g}: residual ratio 4 +- 0.5", abs(r - 4) <= 0.5, f"ratio {r:.3f}"))
    return SuiteReport(4, "a(t) vs exact Heisenberg evolution", tuple(checks))


# 5 -----------------------------------------------------------------------------


PHASE_MIN_RATIO = 3.0


def phase_points(n: int = 20, seed: int = SEED) -> List[Tuple[float, float, float]]:
    """(N0, theta, t) away from the cos(t - theta) = 0 pole."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        N0, th, t = rng.uniform(0.5, 4.0), rng.uniform(0, np.pi), rng.uniform(0.1, 1.5)
        if abs(np.cos(t - th)) > 0.3:
            pts.append((float(N0), float(th), float(t)))
    return pts


def phase_residual_ratios(variant: str = "corrected", lams=(1e-3, 5e-4)) -> Dict[str, List[float]]:
    out: Dict[str, List[float]] = {"U": [], "S": [], "Q": []}
    for N0, th, t in phase_points():
        res = []
        for lam in lams:
            c = observables.pb_phase_params(N0, th, lam, t, variant)
            s = observables.pb_phase_params_from_scratch(N0, th, lam, t)
            res.append((s.U - c.U, s.S - c.S, s.Q - c.Q))
        for k, key in enumerate("USQ"):
            out[key].append(res[0][k] / res[1][k])
    return out


def u_quarter_period_value(N0: float, lam: float) -> float:
    return 0.5 * (1 - 3 * lam * N0 / 8)


def u_half_period_value(N0: float, lam: float) -> float:
    return 0.5 * (1 + 3 * np.sqrt(2) * lam / 4 * (1 + 2 * N0))


def suite_phase() -> SuiteReport:
    checks = []
    ratios = phase_residual_ratios()
    for key, r in ratios.items():
        # a ratio >= 3 under halving means the residual is at least quadratic in lambda;
        # where the lambda^2 coefficient happens to be tiny the ratio drifts toward 8
        checks.append(Check(f"{key}: corrected closed form vs from-scratch, residual O(lambda^2) at 20 points",
                            min(r) >= PHASE_MIN_RATIO, f"ratio range {min(r):.3f}..{max(r):.3f}"))
    q = np.pi / 4
    for variant in observables.VARIANTS:
        err_a = max(abs(observables.pb_phase_params(N0, q, 0.01, q, variant).U - u_quarter_period_value(N0, 0.01))
                    for N0 in (1.0, 4.0))
        err_b = max(abs(observables.pb_phase_params(N0, q, 0.01, 2 * q, variant).U - u_half_period_value(N0, 0.01))
                    for N0 in (1.0, 4.0))
        checks.append(Check(f"U(pi/4, pi/4) special value, {variant}", err_a <= 1e-12, f"max err {err_a:.3e}"))
        checks.append(Check(f"U(pi/4, pi/2) special value, {variant}", err_b <= 1e-12, f"max err {err_b:.3e}"))
    vac = max(abs(observables.pb_phase_params_vacuum(th, 0.01, t).S)
              for th in (0.0, 0.5, 1.0) for t in (0.3, 1.1, 2.0))
    checks.append(Check("vacuum S == 0", vac == 0.0))
    return SuiteReport(5, "phase fluctuations", tuple(checks))


# 6 -----------------------------------------------------------------------------

SQUEEZE_POINTS = ((0.0, 0.0, 1.0), (1.0, 0.3, 0.7), (1.5, 1.0, 1.2))
SQUEEZE_LAMBDAS = (4e-3, 2e-3)


def squeeze_exact(alpha_mag: float, theta: float, lam: float, t: float, dim: int = 100) -> float:
    spec = OscillatorSpec(4, lam, dim)
    X, _ = quadratures(dim)
    psi = coherent_state(alpha_mag, theta, dim)
    v = Spectrum.of(hamiltonian(spec)).propagator(t) @ psi.amp
    Xv = X @ v
    mean = np.vdot(v, Xv).real
    return float(np.vdot(Xv, Xv).real - mean**2)


def squeeze_residual_ratios(variant: str = "corrected") -> List[float]:
    out = []
    for r, th, t in SQUEEZE_POINTS:
        res = [observables.variance_X_quartic(r, th, lam, t, variant) - squeeze_exact(r, th, lam, t)
               for lam in SQUEEZE_LAMBDAS]
        out.append(res[0] / res[1])
    return out


def vacuum_n_pi_value(n: int, lam: float) -> float:
    return 0.5 - 9 * lam**2 / 64 * n**2 * np.pi**2


def vacuum_half_period_value(lam: float) -> float:
    return 0.5 - 0.75 * lam + 3 * lam**2 / 256 * (208 - 3 * np.pi**2)


def in_phase_reduced_value(alpha_mag: float, lam: float, t: float) -> float:
    return 0.5 - 0.75 * lam * np.sin(t) ** 2 - 0.75 * lam * alpha_mag**2 * (t * np.sin(2 * t) + 2 * np.sin(t) ** 2)


def suite_squeezing() -> SuiteReport:
    checks = []
    for variant in observables.VARIANTS:
        err = max(abs(observables.variance_X_vacuum(lam, n * np.pi, variant) - vacuum_n_pi_value(n, lam))
                  for n in (1, 2, 3) for lam in (0.01, 0.05))
        checks.append(Check(f"vacuum at t = n pi, {variant}", err <= 1e-12, f"max err {err:.3e}"))
        err = max(abs(observables.variance_X_vacuum(lam, np.pi / 2, variant) - vacuum_half_period_value(lam))
                  for lam in (0.01, 0.05))
        checks.append(Check(f"vacuum at t = pi/2, {variant}", err <= 1e-12, f"max err {err:.3e}"))
        r = squeeze_residual_ratios(variant)
        checks.append(Check(f"second order vs exact, residual ratio 8 +- 1.5, {variant}",
                            all(abs(x - 8) <= 1.5 for x in r), "ratios " + " ".join(f"{x:.3f}" for x in r)))
    ts = np.linspace(0, np.pi / 2, 52)[1:-1]
    worst = -np.inf
    worst_reduced = 0.0
    for alpha in (0.0, 0.5, 1.0, 2.0):
        for lam in (0.001, 0.01, 0.025, 0.05):
            for t in ts:
                v = observables.variance_X_general(4, alpha, 0.0, lam, t)
                worst = max(worst, v - 0.5)
                worst_reduced = max(worst_reduced, abs(v - in_phase_reduced_value(alpha, lam, t)))
    checks.append(Check("m=4, theta=0 general form equals the reduced closed form", worst_reduced <= 1e-12,
                        f"max err {worst_reduced:.3e}"))
    checks.append(Check("(Delta X)^2 < 1/2 on t in (0, pi/2), lam in (0, 0.05]", worst < 0,
                        f"max excess {worst:.3e}"))
    return SuiteReport(6, "quadrature squeezing", tuple(checks))


# 7 -----------------------------------------------------------------------------


def suite_photon() -> SuiteReport:
    checks = []
    worst = 0.0
    for m in (4, 6, 8):
        for th in (0.1, 0.4, 0.9):
            for alpha in (0.5, 1.0, 2.0):
                worst = max(worst, abs(observables.d_general(m, alpha, th, 0.01, 2 * th)))
    checks.append(Check("d(t = 2 theta) = 0 for m = 4, 6, 8", worst <= 1e-12, f"max |d| {worst:.3e}"))
    ts = np.linspace(0, 2 * np.pi, 100)
    dmin = min(observables.d_quartic(N0, 0.0, 0.01, t) for N0 in (0.5, 1.0, 4.0) for t in ts)
    checks.append(Check("theta = 0: d >= 0 on a 100-point grid", dmin >= 0, f"min d {dmin:.3e}"))
    bad = 0
    for N0 in (0.5, 1.0, 4.0):
        for t in ts:
            d = observables.d_quartic(N0, np.pi / 4, 0.01, t)
            s = np.sin(2 * t)
            if abs(s) > 1e-9 and np.sign(d) != -np.sign(s):
                bad += 1
    checks.append(Check("theta = pi/4: sign(d) = -sign(sin 2t)", bad == 0, f"{bad} mismatches"))
    err = 0.0
    for th in (0.0, np.pi / 4, np.pi / 2, 1.0):
        for t in (0.3, 1.0, 2.5):
            st = observables.photon_stats_quartic(1e-6, th, 0.05, t)
            err = max(err, abs(st.mandel_q - observables.mandel_q_vacuum_limit(th, 0.05, t)))
    checks.append(Check("Mandel Q at N0 = 1e-6 vs vacuum limit within 1e-5", err <= 1e-5, f"max err {err:.3e}"))
    return SuiteReport(7, "photon statistics", tuple(checks))


# 8 -----------------------------------------------------------------------------


def suite_geometric(lambda_prime: float = 0.1) -> SuiteReport:
    worst = 0.0
    for A in (0.0, 1.0, 4.0):
        for th in (0.0, np.pi / 4, np.pi / 2):
            st = geometry.poisson(np.sqrt(A), th)
            direct = geometry.aa_phase_general(st, lambda_prime, geometry.quartic_F(st.dim))
            closed = geometry.aa_phase_quartic_coherent(np.sqrt(A), th, lambda_prime)
            worst = max(worst, abs(direct - closed))
    vac = geometry.aa_phase_m(geometry.vacuum(), 4, lambda_prime)
    spread = np.ptp([geometry.aa_phase_quartic_coherent(1.0, th, lambda_prime) for th in np.linspace(0, np.pi, 9)])
    return SuiteReport(8, "geometric phase", (
        Check("closed form vs direct double sum within 1e-9", worst <= 1e-9, f"max err {worst:.3e}"),
        Check("vacuum value 8 pi", abs(vac - 8 * np.pi) <= 1e-12, f"err {abs(vac - 8 * np.pi):.3e}"),
        Check("beta depends on theta for |alpha| > 0", spread > 1e-6, f"spread {spread:.6f}"),
    ))


# 9 -----------------------------------------------------------------------------


def trajectory_comparison(A: float = 2.0, lam: float = 0.05, t_end: float = 50.0) -> Dict[str, float]:
    tr = classical.rk4_oracle(4, A, 0.0, lam, t_end)
    ren = classical.quartic_classical(A, 0.0, lam, tr.t, 2, renormalized=True)
    raw = classical.quartic_classical(A, 0.0, lam, tr.t, 2, renormalized=False)
    w = classical.zero_crossing_frequency(tr.t, tr.x)
    wp = classical.quartic_omega(A, lam)
    return {
        "renormalized": float(np.max(np.abs(ren - tr.x))),
        "unrenormalized": float(np.max(np.abs(raw - tr.x))),
        "omega_rk4": w,
        "omega_closed": wp,
        "omega_rel": abs(w - wp) / wp,
    }


def suite_classical() -> SuiteReport:
    f = trajectory_comparison()
    return SuiteReport(9, "classical trajectory vs RK4", (
        Check("renormalized vs RK4 max |dx| <= 0.05", f["renormalized"] <= 0.05, f"{f['renormalized']:.4f}"),
        Check("unrenormalized vs RK4 max |dx| > 0.5", f["unrenormalized"] > 0.5, f"{f['unrenormalized']:.4f}"),
        Check("zero-crossing frequency within 0.5%", f["omega_rel"] <= 5e-3,
              f"{f['omega_rk4']:.6f} vs {f['omega_closed']:.6f}"),
    ))


SUITES: Dict[int, Callable[[], SuiteReport]] = {
    1: suite_ordering,
    2: suite_spectra,
    3: suite_equivalence,
    4: suite_evolution,
    5: suite_phase,
    6: suite_squeezing,
    7: suite_photon,
    8: suite_geometric,
    9: suite_classical,
}


def run(selection: Sequence[int] = tuple(SUITES)) -> List[SuiteReport]:
    return [SUITES[k]() for k in selection]


def render(reports: Sequence[SuiteReport]) -> str:
    lines: List[str] = []
    for r in reports:
        lines.extend(r.lines())
    n_ok = sum(r.passed for r in reports)
    lines.append(f"{n_ok}/{len(reports)} suites passed")
    return "\n".join(lines) + "\n"
