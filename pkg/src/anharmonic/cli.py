"""Command-line sweeps over the library.

Every grid flag takes a comma-separated list; rows are emitted for the Cartesian
product in a fixed key order.  A config file holds the same keys as flat
``key = value`` lines; command-line flags override it.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__, classical, evolution, geometry, observables, ordering, spectra, verify
from .fock import (
    ContractError,
    OscillatorSpec,
    Spectrum,
    TruncationError,
    coherent_state,
    default_dim,
    expectation,
    hamiltonian,
    ladder_ops,
    quadratures,
)

Row = Dict[str, Any]

# key -> (type, default)
GRID_TYPES: Dict[str, type] = {
    "m": int, "lambda": float, "alpha": float, "N0": float, "theta": float, "t": float,
    "n": int, "dim": int, "A": float, "v0": float, "t_end": float,
}
OPTION_KEYS = ("format", "out", "variant", "oracle", "dt", "stride", "secular", "suite")


class ConfigError(ValueError):
    """Invalid configuration file or flag value."""


# --- parsing ------------------------------------------------------------------


def parse_grid(key: str, text: str) -> List[Any]:
    kind = GRID_TYPES[key]
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        try:
            v = kind(item) if kind is float else int(float(item))
        except ValueError:
            raise ConfigError(f"{key}: cannot read {item!r} as {kind.__name__}") from None
        if kind is int and float(item) != int(float(item)):
            raise ConfigError(f"{key}: {item!r} is not an integer")
        if not math.isfinite(v):
            raise ConfigError(f"{key}: values must be finite, got {item!r}")
        out.append(v)
    if not out:
        raise ConfigError(f"{key}: empty grid")
    return out


def read_config(path: str) -> Dict[str, str]:
    """Flat ``key = value`` text; ``#`` starts a comment."""
    out: Dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "lam":
            key = "lambda"
        if key not in GRID_TYPES and key not in OPTION_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


# --- formatting -------------------------------------------------------------------


def _num(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return float(f"{v:.12g}")
    return v


def _csv_cell(v: Any) -> str:
    v = _num(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def render_rows(rows: Sequence[Row], fmt: str, meta: Dict[str, Any]) -> str:
    if fmt == "json":
        doc = {"meta": meta, "rows": [{k: _num(v) for k, v in r.items()} for r in rows]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        keys = list(rows[0])
        w.writerow(keys)
        for r in rows:
            w.writerow([_csv_cell(r.get(k)) for k in keys])
    return buf.getvalue()


# --- subcommands ----------------------------------------------------------------

ROW_ERRORS = (ContractError, TruncationError, ValueError, ArithmeticError, np.linalg.LinAlgError)


@lru_cache(maxsize=64)
def _spectrum(m: int, lam: float, dim: int) -> Spectrum:
    return Spectrum.of(hamiltonian(OscillatorSpec(m, lam, dim)))


@lru_cache(maxsize=64)
def _spacings(m: int, lam: float, dim: int) -> np.ndarray:
    return np.diff(_spectrum(m, lam, dim).energies)


def _order(p: Row, opt: Dict[str, Any]) -> Row:
    m = p["m"]
    poly = ordering.normal_order_power(m)
    agree = poly == ordering.brute_force_normal_order(m) if m <= ordering.BRUTE_FORCE_GUARD else None
    return {
        "m": m,
        "coefficients": " ".join(str(c) for c in ordering.colon_coefficients(m)),
        "normal_ordered_terms": len(poly.terms),
        "brute_force_agrees": agree,
        "provenance": "closed-form",
    }


def _spectra(p: Row, opt: Dict[str, Any]) -> Row:
    m, lam, n, dim = p["m"], p["lambda"], p["n"], p["dim"]
    omega = spectra.freq_operator_first(m)
    second = None
    if m == 4:
        c = spectra.quartic_spacing_coeffs(n + 1)
        second = float(c[0]) + lam * float(c[1]) + lam**2 * float(c[2])
    exact = float(_spacings(m, lam, dim)[n]) if n + 1 < dim else None
    return {
        "m": m, "lambda": lam, "n": n, "dim": dim,
        "energy_first": spectra.first_order_energy(m, n).value(lam),
        "omega1_diag": float(omega.at_level(n)),
        "spacing_first": 1 + lam * float(omega.at_level(n)),
        "spacing_second": second,
        "spacing_exact": exact,
        "provenance": "closed-form+oracle",
        "perturbative": spectra.perturbative_ok(m, lam, n + 1),
        "truncation_ok": 4 * (n + 1) <= dim,
    }


def _evolve(p: Row, opt: Dict[str, Any]) -> Row:
    m, lam, alpha, theta, t = p["m"], p["lambda"], p["alpha"], p["theta"], p["t"]
    dim = p["dim"] or default_dim(alpha, m)
    spec = OscillatorSpec(m, lam, dim)
    psi = coherent_state(alpha, theta, dim)
    a1 = expectation(evolution.a_first_order(spec, t), psi)
    a2 = expectation(evolution.a_secular_removed(spec, t, opt["placement"]), psi)
    row: Row = {
        "m": m, "lambda": lam, "alpha": alpha, "theta": theta, "t": t, "dim": dim,
        "a_first_re": a1.real, "a_first_im": a1.imag,
        "a_resummed_re": a2.real, "a_resummed_im": a2.imag,
    }
    if opt["oracle"]:
        a, _ = ladder_ops(dim)
        ex = expectation(_spectrum(m, lam, dim).heisenberg(a, t), psi)
        row.update({"a_exact_re": ex.real, "a_exact_im": ex.imag})
    row.update({"provenance": "closed-form", "secular_ok": evolution.secular_ok(lam, t),
                "truncation_tail": psi.tail_mass})
    return row


def _phase(p: Row, opt: Dict[str, Any]) -> Row:
    N0, theta, t, lam = p["N0"], p["theta"], p["t"], p["lambda"]
    v = opt["variant"]
    pp = observables.pb_phase_params(N0, theta, lam, t, v)
    row: Row = {
        "N0": N0, "theta": theta, "t": t, "lambda": lam, "variant": v,
        "U": pp.U, "S": pp.S, "Q": pp.Q, "U0": pp.U0, "S0": pp.S0, "Q0": pp.Q0,
    }
    if opt["oracle"]:
        sc = observables.pb_phase_params_from_scratch(N0, theta, lam, t)
        row.update({"U_scratch": sc.U, "S_scratch": sc.S, "Q_scratch": sc.Q})
    row.update({"provenance": pp.provenance, "pole": pp.pole, "secular_ok": evolution.secular_ok(lam, t)})
    return row


def _squeeze_exact(m: int, alpha: float, theta: float, lam: float, t: float) -> float:
    dim = default_dim(alpha, m) + 60
    X, _ = quadratures(dim)
    psi = coherent_state(alpha, theta, dim)
    v = _spectrum(m, lam, dim).propagator(t) @ psi.amp
    Xv = X @ v
    return float(np.vdot(Xv, Xv).real - np.vdot(v, Xv).real ** 2)


def _squeeze(p: Row, opt: Dict[str, Any]) -> Row:
    m, alpha, theta, lam, t = p["m"], p["alpha"], p["theta"], p["lambda"], p["t"]
    v = opt["variant"]
    if m == 4:
        var = observables.variance_X_quartic(alpha, theta, lam, t, v)
        order = 2
    else:
        var = observables.variance_X_general(m, alpha, theta, lam, t, v)
        order = 1
    row: Row = {"m": m, "alpha": alpha, "theta": theta, "lambda": lam, "t": t, "variant": v,
                "order": order, "var_X": var}
    if opt["oracle"]:
        row["var_X_exact"] = _squeeze_exact(m, alpha, theta, lam, t)
    row.update({"squeezed": var < 0.5, "provenance": f"closed-form:{v}",
                "secular_ok": evolution.secular_ok(lam, t)})
    return row


def _stats(p: Row, opt: Dict[str, Any]) -> Row:
    m, N0, theta, lam, t = p["m"], p["N0"], p["theta"], p["lambda"], p["t"]
    if m == 4:
        st = observables.photon_stats_quartic(N0, theta, lam, t)
        mean, var, d, g2, q, cls, lim = st.mean, st.var, st.d, st.g2, st.mandel_q, st.classification, st.limit
        if lim:
            q = st.mandel_q_limit
    else:
        alpha = math.sqrt(N0)
        mean = observables.photon_mean_general(m, alpha, theta, lam, t)
        d = observables.d_general(m, alpha, theta, lam, t)
        var = mean + d
        lim = N0 == 0
        g2 = None if lim else 1 + d / mean**2
        q = None if lim else d / mean
        cls = observables.classify(d, mean)
    return {
        "m": m, "N0": N0, "theta": theta, "lambda": lam, "t": t,
        "mean": mean, "var": var, "d": d, "g2": g2, "mandel_q": q, "classification": cls,
        "provenance": "closed-form", "limit": lim, "secular_ok": evolution.secular_ok(lam, t),
    }


def _geometric(p: Row, opt: Dict[str, Any]) -> Row:
    m, alpha, theta, lp = p["m"], p["alpha"], p["theta"], p["lambda"]
    st = geometry.poisson(alpha, theta)
    closed = geometry.aa_phase_quartic_coherent(alpha, theta, lp, opt["variant"]) if m == 4 else None
    return {
        "m": m, "alpha": alpha, "theta": theta, "lambda_prime": lp, "dim": st.dim,
        "beta_sum": geometry.aa_phase_m(st, m, lp), "beta_closed": closed,
        "provenance": "double-sum+closed-form" if m == 4 else "double-sum",
    }


def _classical(p: Row, opt: Dict[str, Any]) -> List[Row]:
    m, A, v0, lam, t_end = p["m"], p["A"], p["v0"], p["lambda"], p["t_end"]
    tr = classical.rk4_oracle(m, A, v0, lam, t_end, opt["dt"])
    idx = np.arange(0, tr.t.size, opt["stride"])
    t = tr.t[idx]
    renorm = not opt["secular"]
    try:
        pert = classical.classical(m, A, v0, lam, t, renormalized=renorm)
        note = ""
    except classical.UnsupportedCaseError as exc:
        pert, note = np.full(t.shape, np.nan), str(exc)
    raw = classical.classical(m, A, v0, lam, t, renormalized=False)
    return [
        {"m": m, "A": A, "v0": v0, "lambda": lam, "t": float(ti), "x_pert": float(xp), "x_secular": float(xs),
         "x_rk4": float(xr), "renormalized": renorm, "provenance": "closed-form+rk4", "note": note}
        for ti, xp, xs, xr in zip(t, pert, raw, tr.x[idx])
    ]


Handler = Callable[[Row, Dict[str, Any]], Any]

# subcommand -> (handler, grid keys in emission order, defaults)
SUBCOMMANDS: Dict[str, Tuple[Handler, Tuple[str, ...], Dict[str, str]]] = {
    "order": (_order, ("m",), {"m": "4"}),
    "spectra": (_spectra, ("m", "lambda", "n", "dim"), {"m": "4", "lambda": "0.01", "n": "0", "dim": "128"}),
    "evolve": (_evolve, ("m", "lambda", "alpha", "theta", "t", "dim"),
               {"m": "4", "lambda": "0.01", "alpha": "1", "theta": "0", "t": "1", "dim": "0"}),
    "phase": (_phase, ("N0", "theta", "t", "lambda"), {"N0": "1", "theta": "0", "t": "1", "lambda": "0.01"}),
    "squeeze": (_squeeze, ("m", "alpha", "theta", "lambda", "t"),
                {"m": "4", "alpha": "0", "theta": "0", "lambda": "0.01", "t": "1"}),
    "stats": (_stats, ("m", "N0", "theta", "lambda", "t"),
              {"m": "4", "N0": "1", "theta": "0", "lambda": "0.01", "t": "1"}),
    "geometric": (_geometric, ("m", "alpha", "theta", "lambda"),
                  {"m": "4", "alpha": "1", "theta": "0", "lambda": "0.1"}),
    "classical": (_classical, ("m", "A", "v0", "lambda", "t_end"),
                  {"m": "4", "A": "2", "v0": "0", "lambda": "0.05", "t_end": "50"}),
}

# columns -> producing operation, reported in JSON metadata
PROVENANCE = {
    "order": "ordering.colon_coefficients, ordering.brute_force_normal_order",
    "spectra": "spectra.first_order_energy, spectra.freq_operator_first, spectra.quartic_spacing_coeffs, "
               "eigvalsh oracle",
    "evolve": "evolution.a_first_order, evolution.a_secular_removed, exact Heisenberg oracle",
    "phase": "observables.pb_phase_params, observables.pb_phase_params_from_scratch",
    "squeeze": "observables.variance_X_quartic, observables.variance_X_general, exact oracle",
    "stats": "observables.photon_stats_quartic, observables.d_general, observables.photon_mean_general",
    "geometric": "geometry.aa_phase_m, geometry.aa_phase_quartic_coherent",
    "classical": "classical.classical, classical.rk4_oracle",
}


def sweep(sub: str, settings: Dict[str, str], opt: Dict[str, Any]) -> Tuple[List[Row], Dict[str, Any]]:
    handler, keys, defaults = SUBCOMMANDS[sub]
    unused = sorted(k for k in settings if k in GRID_TYPES and k not in keys)
    if unused:
        raise ConfigError(f"{sub} does not take {', '.join(unused)}; it sweeps over {', '.join(keys)}")
    grids ={k: parse_grid(k, settings.get(k, defaults[k])) for k in keys}
    if "dim" in grids and any(d < 0 for d in grids["dim"]):
        raise ConfigError("dim must be >= 0")
    rows: List[Row] = []
    for combo in itertools.product(*(grids[k] for k in keys)):
        p = dict(zip(keys, combo))
        try:
            out = handler(p, opt)
        except ROW_ERRORS as exc:
            out = dict(p, error=f"{type(exc).__name__}: {exc}")
        rows.extend(out if isinstance(out, list) else [out])
    # rows that failed carry fewer columns; pad so every row has the same keys
    keys_all: List[str] = []
    for r in rows:
        for k in r:
            if k not in keys_all:
                keys_all.append(k)
    if any("error" in r for r in rows) and "error" not in keys_all:
        keys_all.append("error")
    rows = [{k: r.get(k) for k in keys_all} for r in rows]
    return rows, grids


# --- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anharmonic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)
    for name in list(SUBCOMMANDS) + ["verify"]:
        sp = subs.add_parser(name)
        sp.add_argument("--config", help="flat key = value file; flags override it")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--out", help="write here instead of stdout")
        if name == "verify":
            sp.add_argument("--suite", help="comma-separated suite numbers (default: all)")
            continue
        for key in ("m", "lambda", "alpha", "theta", "t", "n", "dim"):
            sp.add_argument(f"--{key}", dest=key)
        sp.add_argument("--N0", dest="N0", help="input photon number |alpha|^2")
        sp.add_argument("--A", dest="A", help="classical initial amplitude")
        sp.add_argument("--v0", dest="v0", help="classical initial velocity")
        sp.add_argument("--t-end", dest="t_end")
        sp.add_argument("--variant", choices=observables.VARIANTS)
        sp.add_argument("--oracle", action="store_true", default=None,
                        help="add exact or from-scratch comparison columns")
        sp.add_argument("--placement", choices=evolution.PLACEMENTS, default="left")
        sp.add_argument("--dt", help="RK4 step (classical)")
        sp.add_argument("--stride", help="emit every k-th RK4 sample (classical)")
        sp.add_argument("--secular", action="store_true", default=None,
                        help="use the unrenormalized series for x_pert (classical)")
    return parser


def _settings(args: argparse.Namespace) -> Dict[str, str]:
    settings = read_config(args.config) if args.config else {}
    for key in list(GRID_TYPES) + list(OPTION_KEYS):
        v = getattr(args, key, None)
        if v is not None:
            settings[key] = v if isinstance(v, str) else str(v)
    return settings


def _flag(settings: Dict[str, str], key: str) -> bool:
    return str(settings.get(key, "false")).lower() in ("1", "true", "yes", "on")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verify(settings: Dict[str, str], fmt: str) -> Tuple[str, int]:
    sel = tuple(verify.SUITES)
    if settings.get("suite"):
        try:
            sel = tuple(int(s) for s in settings["suite"].split(","))
        except ValueError:
            raise ConfigError(f"suite: expected integers, got {settings['suite']!r}") from None
        unknown = [s for s in sel if s not in verify.SUITES]
        if unknown:
            raise ConfigError(f"unknown suites {unknown}")
    reports = verify.run(sel)
    code = 0 if all(r.passed for r in reports) else 1
    if fmt == "text":
        return verify.render(reports), code
    rows = [{"suite": r.number, "title": r.title, "check": c.name, "passed": c.passed, "detail": c.detail}
            for r in reports for c in r.checks]
    meta = {"version": __version__, "command": "verify", "config_echo": {"suite": list(sel)}}
    return render_rows(rows, fmt, meta), code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _settings(args)
        fmt = settings.get("format", "csv" if args.command != "verify" else "text")
        if fmt not in ("csv", "json", "text"):
            raise ConfigError(f"format must be csv or json, got {fmt!r}")
        if args.command == "verify":
            text, code = _verify(settings, fmt)
            _emit(text, settings.get("out"))
            return code
        variant = settings.get("variant", "corrected")
        if variant not in observables.VARIANTS:
            raise ConfigError(f"variant must be one of {observables.VARIANTS}")
        opt = {
            "variant": variant,
            "oracle": _flag(settings, "oracle"),
            "secular": _flag(settings, "secular"),
            "placement": args.placement,
            "dt": float(settings.get("dt", "1e-3")),
            "stride": int(settings.get("stride", "100")),
        }
        if opt["dt"] <= 0 or opt["stride"] < 1:
            raise ConfigError("dt must be > 0 and stride >= 1")
        rows, grids = sweep(args.command, settings, opt)
        if fmt == "text":
            fmt = "csv"
        meta = {
            "version": __version__,
            "command": args.command,
            "config_echo": {**grids, **{k: v for k, v in opt.items()}},
            "provenance": PROVENANCE[args.command],
        }
        _emit(render_rows(rows, fmt, meta), settings.get("out"))
        return 0
    except (ConfigError, classical.StepSizeError) as exc:
        print(f"anharmonic: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
