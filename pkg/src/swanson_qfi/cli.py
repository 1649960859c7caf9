"""Command-line front end: QFI tables, figure data, Fock-lab and estimator runs.

Exit codes: 0 success, 2 domain or configuration error, 3 asserted-invariant
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import estimation, fock
from .exceptions import SwansonQfiError
from .gaussian import MEAN_FIDELITY_COEFF
from .qfi import MEAN_QFI_COEFF, qfi_bures_fd, qfi_gaussian_closed, relative_discrepancy
from .swanson import (
    SwansonParams,
    energetic_cost,
    gain_ratio,
    probe_family,
    qfi_closed_forms,
    qfi_epsilon_closed,
    require_unbroken,
)

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_INVARIANT = 3

QFI_COLUMNS = [
    "omega", "temperature", "epsilon", "Omega", "qfi_omega_closed", "qfi_T_paper",
    "qfi_T_authoritative", "qfi_epsilon_closed", "qfi_bures_fd_target", "target",
    "rel_discrepancy",
]
ERROR_COLUMNS = ["omega", "temperature", "epsilon", "target", "error"]

CONVENTIONS = {
    "covariance_convention": "vacuum = identity, x = (a + a^dag)/sqrt(2)",
    "mean_fidelity_coeff_c": MEAN_FIDELITY_COEFF,
    "mean_qfi_coeff_c_m": MEAN_QFI_COEFF,
    "purity_exponent": -0.5,
    "dyson_lambda": "derived: -omega (alpha - beta) / (omega - alpha - beta), x = q",
    "temperature_qfi": "Omega^2 / (4 T^4 sinh^2(Omega / 2T))",
    "delta_u_sign": "as computed (no absolute value unless abs_cost)",
}

FIG1_TE = [(0.1, 0.2), (0.1, 0.3), (0.5, 0.3)]
FIG1_WE = [(2.0, 0.2), (2.0, 0.3), (4.0, 0.3)]
FIG2_TE = [(0.1, 0.2), (0.1, 0.33), (0.5, 0.2)]
FIG2_WE = [(2.0, 0.2), (2.0, 0.33), (4.0, 0.33)]
FIG3_TEMPS = {"fig3a": 0.5, "fig3b": 1.0}

DEFAULTS = {
    "omega": "2", "temp": "0.5", "eps": "0.2", "target": "omega", "trunc": 64,
    "seed": 42, "replicas": 200, "samples": 100000, "format": "csv", "alpha": 1.0,
}


CONFIG_ALIASES = {"lambda": "lam", "temperature": "temp", "epsilon": "eps"}


class ConfigError(SwansonQfiError):
    """Malformed grid, config file or flag combination."""


# -- parsing ------------------------------------------------------------------------

def parse_grid(text: str) -> List[float]:
    """A scalar, a comma list, or ``start:stop:step`` (stop included)."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(s) for s in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, stop, step = parts
            if not step > 0 or stop < start:
                raise ConfigError(f"bad range {text!r}: need step > 0 and stop >= start")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(n)]
        return [float(s) for s in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}") from exc


def read_config(path: str) -> Dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _truthy(value) -> bool:
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swanson-qfi",
        description="Quantum Fisher information of a thermal Swanson-oscillator probe.",
    )
    parser.add_argument("--config", help="key = value file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=True):
        p.add_argument("--config", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        if grid:
            p.add_argument("--omega", help="bare frequency: value or start:stop:step")
            p.add_argument("--temp", help="temperature: value or start:stop:step")
            p.add_argument("--eps", help="non-Hermiticity: value or start:stop:step")
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument("--format", choices=["csv", "json"])

    p = sub.add_parser("qfi", help="closed-form and finite-difference QFIs on a grid")
    common(p)
    p.add_argument("--target", choices=["omega", "temperature", "epsilon"])
    p.add_argument("--fd-step", type=float, dest="fd_step")

    p = sub.add_parser("gain", help="gain ratio in dB against the Hermitian baseline")
    common(p)
    p.add_argument("--target", choices=["omega", "temperature"])

    p = sub.add_parser("energy-cost", help="QFI per unit energetic cost")
    common(p)
    p.add_argument("--target", choices=["omega", "temperature"])
    p.add_argument("--abs-cost", action="store_true", default=None, dest="abs_cost")
    p.add_argument("--trunc", type=int)

    p = sub.add_parser("figures", help="curve data for all figures into a directory")
    common(p)
    p.add_argument("--abs-cost", action="store_true", default=None, dest="abs_cost")
    p.add_argument("--trunc", type=int)

    p = sub.add_parser("fock-verify", help="truncated Fock-space checks of the Dyson map")
    common(p)
    p.add_argument("--trunc", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--lambda", type=float, dest="lam", help="override the Dyson coefficient")
    p.add_argument("--lambda-offset", type=float, dest="lambda_offset",
                   help="add to the selected Dyson coefficient (negative control)")
    p.add_argument("--lambda-choice", choices=["derived", "paper"], dest="lambda_choice")

    p = sub.add_parser("simulate", help="homodyne estimator vs the Cramer-Rao bound")
    common(p)
    p.add_argument("--target", choices=["omega", "temperature"])
    p.add_argument("--seed", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--samples", type=int)
    return parser


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file, then from built-in defaults."""
    config = read_config(args.config) if args.config else {}
    config = {CONFIG_ALIASES.get(k, k): v for k, v in config.items()}
    known = set(vars(args))
    for key in config:
        if key not in known or key in ("command", "config"):
            raise ConfigError(f"unknown config key {key!r} for {args.command}")
    casts = {"trunc": int, "seed": int, "replicas": int, "samples": int,
             "fd_step": float, "alpha": float, "lam": float, "lambda_offset": float,
             "abs_cost": _truthy}
    for key in known:
        if getattr(args, key) is not None:
            continue
        if key in config:
            value = config[key]
            try:
                value = casts.get(key, str)(value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {value!r}") from exc
            setattr(args, key, value)
        elif key in DEFAULTS:
            setattr(args, key, DEFAULTS[key])
    if getattr(args, "abs_cost", None) is None and "abs_cost" in known:
        args.abs_cost = False
    return args


# -- output --------------------------------------------------------------------------

def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def emit_table(args, columns, rows, errors, meta_extra=None) -> None:
    """Write rows (CSV or JSON), the errors sidecar and the metadata sidecar."""
    meta = {"command": args.command, "conventions": CONVENTIONS}
    meta.update(meta_extra or {})
    if args.format == "json":
        body = json.dumps({
            "conventions": CONVENTIONS,
            "rows": [dict(zip(columns, row)) for row in rows],
            "errors": [dict(zip(ERROR_COLUMNS, e)) for e in errors],
            **(meta_extra or {}),
        }, indent=2, default=_json_default) + "\n"
    else:
        body = csv_text(columns, rows)
    if args.out:
        out = Path(args.out)
        out.write_text(body)
        if args.format != "json":
            Path(f"{out}.errors.csv").write_text(csv_text(ERROR_COLUMNS, errors))
            Path(f"{out}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    else:
        sys.stdout.write(body)
        if errors and args.format != "json":
            sys.stderr.write(csv_text(ERROR_COLUMNS, errors))


def emit_json(args, payload: dict) -> None:
    body = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    if args.out:
        Path(args.out).write_text(body)
    else:
        sys.stdout.write(body)


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    raise TypeError(f"not serialisable: {type(value).__name__}")


def _grid(args):
    for omega in parse_grid(args.omega):
        for temp in parse_grid(args.temp):
            for eps in parse_grid(args.eps):
                yield omega, temp, eps


# -- subcommands --------------------------------------------------------------------

def qfi_row(omega, temp, eps, target, fd_step=None):
    p = SwansonParams(omega, eps, temp)
    Omega = require_unbroken(p)
    forms = qfi_closed_forms(p, fd_step)
    family = probe_family(p, target)
    theta = getattr(p, target)
    fd = qfi_bures_fd(family, theta, fd_step)
    if target == "omega":
        closed = forms.I_omega
    elif target == "epsilon":
        closed = forms.I_epsilon
    else:
        closed = qfi_gaussian_closed(family, theta)
    return [omega, temp, eps, Omega, forms.I_omega, forms.I_T_paper,
            forms.I_T_authoritative, forms.I_epsilon, fd, target,
            relative_discrepancy(closed, fd)]


def cmd_qfi(args) -> int:
    rows, errors = [], []
    for omega, temp, eps in _grid(args):
        try:
            rows.append(qfi_row(omega, temp, eps, args.target, args.fd_step))
        except SwansonQfiError as exc:
            errors.append([omega, temp, eps, args.target, str(exc)])
    emit_table(args, QFI_COLUMNS, rows, errors)
    return EXIT_OK


def cmd_gain(args) -> int:
    rows, errors = [], []
    for omega, temp, eps in _grid(args):
        try:
            rows.append([omega, temp, eps, args.target,
                         gain_ratio(SwansonParams(omega, eps, temp), args.target)])
        except SwansonQfiError as exc:
            errors.append([omega, temp, eps, args.target, str(exc)])
    emit_table(args, ["omega", "temperature", "epsilon", "target", "gain_db"], rows, errors)
    return EXIT_OK


COST_COLUMNS = ["omega", "temperature", "epsilon", "target", "qfi", "delta_u_paper",
                "delta_u_oracle", "u_theta", "u_theta_oracle", "abs_cost"]


def cost_row(omega, temp, eps, target, abs_cost, trunc):
    c = energetic_cost(SwansonParams(omega, eps, temp), target, abs_cost, trunc)
    return [omega, temp, eps, target, c.qfi, c.delta_u_paper, c.delta_u_oracle,
            c.u_theta, c.u_theta_oracle, c.abs_cost]


def cmd_energy_cost(args) -> int:
    _check_trunc(args.trunc)
    rows, errors = [], []
    for omega, temp, eps in _grid(args):
        try:
            rows.append(cost_row(omega, temp, eps, args.target, args.abs_cost, args.trunc))
        except SwansonQfiError as exc:
            errors.append([omega, temp, eps, args.target, str(exc)])
    emit_table(args, COST_COLUMNS, rows, errors)
    return EXIT_OK


def _check_trunc(N: int) -> None:
    if not 16 <= N <= 256:
        raise ConfigError("--trunc must lie in [16, 256]")


def cmd_fock_verify(args) -> int:
    _check_trunc(args.trunc)
    omega = _scalar(args.omega, "omega")
    eps = _scalar(args.eps, "eps")
    temp = _scalar(args.temp, "temp")
    choice = args.lambda_choice or "derived"
    lam = args.lam
    if args.lambda_offset is not None:
        if lam is None:
            from .swanson import dyson_coefficient
            coeffs = dyson_coefficient(SwansonParams(omega, eps, temp, args.alpha))
            lam = coeffs.derived if choice == "derived" else coeffs.paper
        lam += args.lambda_offset
    report = fock.fock_lab(omega, eps, args.alpha, temp, args.trunc, lam=lam,
                           lambda_choice=choice)
    payload = report.to_dict()
    payload["conventions"] = CONVENTIONS
    emit_json(args, payload)
    if not report.passed:
        sys.stderr.write("asserted invariants failed: " + ", ".join(report.failures) + "\n")
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_simulate(args) -> int:
    p = SwansonParams(_scalar(args.omega, "omega"), _scalar(args.eps, "eps"),
                      _scalar(args.temp, "temp"))
    target = args.target if args.target != "epsilon" else None
    if target is None:
        raise ConfigError("simulate supports --target omega or temperature")
    run = estimation.crb_experiment(p, target, args.samples, args.replicas, args.seed)
    payload = json.loads(run.to_json())
    payload["conventions"] = CONVENTIONS
    emit_json(args, payload)
    if not run.crb_check_passed:
        sys.stderr.write("empirical variance below the quantum Cramer-Rao bound margin\n")
        return EXIT_INVARIANT
    return EXIT_OK


def _scalar(text, name) -> float:
    values = parse_grid(text)
    if len(values) != 1:
        raise ConfigError(f"--{name} must be a single value for this command")
    return values[0]


# -- figures --------------------------------------------------------------------------

def _axis(text: Optional[str], default: str) -> List[float]:
    return parse_grid(text if text is not None else default)


def cmd_figures(args) -> int:
    _check_trunc(args.trunc)
    outdir = Path(args.out or "figures")
    outdir.mkdir(parents=True, exist_ok=True)
    # unset grids use per-figure defaults rather than the scalar defaults
    explicit = {k: getattr(args, f"_explicit_{k}", None) for k in ("omega", "temp", "eps")}
    omegas_fig1 = _axis(explicit["omega"], "2.05:8:0.05")
    omegas_fig2 = _axis(explicit["omega"], "1:6:0.1")
    temps = _axis(explicit["temp"], "0.05:2:0.05")
    eps_fig3 = _axis(explicit["eps"], "0.01:0.49:0.02")
    omegas_fig3 = _axis(explicit["omega"], "0.5:4:0.1")
    notes: Dict[str, List[str]] = {}

    def write(name, columns, rows, errors, note=None):
        (outdir / f"{name}.csv").write_text(csv_text(columns, rows))
        (outdir / f"{name}.csv.errors.csv").write_text(csv_text(ERROR_COLUMNS, errors))
        if note:
            notes.setdefault(name, []).append(note)

    # fig1a: gain ratio for omega vs omega
    rows, errors = [], []
    dropped = [w for w in omegas_fig1 if not w > 2]
    for temp, eps in FIG1_TE:
        for w in omegas_fig1:
            if not w > 2:
                continue
            try:
                rows.append([f"T={temp},eps={eps}", temp, eps, w,
                             gain_ratio(SwansonParams(w, eps, temp), "omega")])
            except SwansonQfiError as exc:
                errors.append([w, temp, eps, "omega", str(exc)])
    write("fig1a", ["curve", "temperature", "epsilon", "omega", "gain_db"], rows, errors,
          "omega grid restricted to omega > 2 (Hermitian baseline domain)"
          + (f"; dropped {len(dropped)} points" if dropped else ""))

    # fig1b: gain ratio for T vs T
    rows, errors = [], []
    for w, eps in FIG1_WE:
        for temp in temps:
            try:
                rows.append([f"omega={w},eps={eps}", w, eps, temp,
                             gain_ratio(SwansonParams(w, eps, temp), "temperature")])
            except SwansonQfiError as exc:
                errors.append([w, temp, eps, "temperature", str(exc)])
    write("fig1b", ["curve", "omega", "epsilon", "temperature", "gain_db"], rows, errors,
          "curves with omega <= 2 have no Hermitian baseline; see the errors sidecar")

    cost_cols = ["curve", "omega", "temperature", "epsilon", "qfi", "delta_u_paper",
                 "delta_u_oracle", "u_theta", "u_theta_oracle"]

    def cost(w, temp, eps, target, label):
        c = energetic_cost(SwansonParams(w, eps, temp), target, args.abs_cost, args.trunc)
        return [label, w, temp, eps, c.qfi, c.delta_u_paper, c.delta_u_oracle,
                c.u_theta, c.u_theta_oracle]

    rows, errors = [], []
    for temp, eps in FIG2_TE:
        for w in omegas_fig2:
            try:
                rows.append(cost(w, temp, eps, "omega", f"T={temp},eps={eps}"))
            except SwansonQfiError as exc:
                errors.append([w, temp, eps, "omega", str(exc)])
    write("fig2a", cost_cols, rows, errors)

    rows, errors = [], []
    for w, eps in FIG2_WE:
        for temp in temps:
            try:
                rows.append(cost(w, temp, eps, "temperature", f"omega={w},eps={eps}"))
            except SwansonQfiError as exc:
                errors.append([w, temp, eps, "temperature", str(exc)])
    write("fig2b", cost_cols, rows, errors)

    fig3_cols = ["omega", "temperature", "epsilon", "qfi_epsilon"]
    for name, temp in FIG3_TEMPS.items():
        rows, errors = [], []
        for w in omegas_fig3:
            for eps in eps_fig3:
                try:
                    rows.append([w, temp, eps, qfi_epsilon_closed(SwansonParams(w, eps, temp))])
                except SwansonQfiError as exc:
                    errors.append([w, temp, eps, "epsilon", str(exc)])
        write(name, fig3_cols, rows, errors, f"I_eps over (eps, omega) at T = {temp}")

    rows, errors = [], []
    for temp in _axis(explicit["temp"], "0.1:2:0.1"):
        for eps in eps_fig3:
            try:
                rows.append([1.0, temp, eps, qfi_epsilon_closed(SwansonParams(1.0, eps, temp))])
            except SwansonQfiError as exc:
                errors.append([1.0, temp, eps, "epsilon", str(exc)])
    write("fig3b_omega1", fig3_cols, rows, errors,
          "alternative reading: fixed omega = 1 slice over (eps, T)")

    meta = {"command": "figures", "conventions": CONVENTIONS, "abs_cost": args.abs_cost,
            "notes": notes}
    (outdir / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return EXIT_OK


COMMANDS = {
    "qfi": cmd_qfi,
    "gain": cmd_gain,
    "energy-cost": cmd_energy_cost,
    "figures": cmd_figures,
    "fock-verify": cmd_fock_verify,
    "simulate": cmd_simulate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        for key in ("omega", "temp", "eps"):
            setattr(args, f"_explicit_{key}", getattr(args, key, None))
        args = resolve(args)
        if args.command == "figures":
            config = read_config(args.config) if args.config else {}
            config = {CONFIG_ALIASES.get(k, k): v for k, v in config.items()}
            for key in ("omega", "temp", "eps"):
                if getattr(args, f"_explicit_{key}") is None and key in config:
                    setattr(args, f"_explicit_{key}", config[key])
        return COMMANDS[args.command](args)
    except SwansonQfiError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
