"""Batch command-line front end.

Four subcommands: ``classify`` (verdict for one configuration), ``qcurve``
(tables of Q and Qt against mode order), ``sweep`` (verdict phase map over
the conductivity ratio and interface radius), and ``verify`` (runs the
numerical oracle suites and emits pass/fail records).

Configuration comes from flags, optionally backed by a KEY=VALUE file via
``--config``; flags win over file values.  Reports are deterministic: the
timestamp lives in a separate header field so payload bytes are comparable
across runs.  Exit status: 0 success, 1 usage/parameter error, 2 numerical
failure.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import __version__
from .analytic import (
    BallGeometry,
    Medium,
    classify as classify_shape,
    q_perimeter_values,
    q_volume_values,
    stress_function,
    torsional_rigidity_concentric,
)
from .errors import NumericalError
from .fem2d import default_t_samples, estimate_q
from .fem2d.family import build_family
from .radial import energy_observed_order, energy_richardson, solve_radial

VOLUME_Q_RTOL = 0.10
PERIMETER_Q_RTOL = 0.15

_DEFAULTS = {
    "dim": 2,
    "radius": 0.5,
    "sigma_in": 2.0,
    "sigma_out": 1.0,
    "constraint": "volume",
    "kmax": 20,
    "mesh_h": 0.02,
    "t_max": None,
    "n_t": None,
    "format": None,
    "suite": "radial",
    "n": 4096,
    "fit_rtol": 1e-5,
    "rho_min": 0.2,
    "rho_max": 5.0,
    "n_rho": 10,
    "radius_min": 0.1,
    "radius_max": 0.9,
    "n_radius": 10,
}

_FLOAT_KEYS = {
    "radius", "sigma_in", "sigma_out", "mesh_h", "t_max", "fit_rtol",
    "rho_min", "rho_max", "radius_min", "radius_max",
}
_INT_KEYS = {"dim", "kmax", "n_t", "n", "n_rho", "n_radius"}


def _read_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected KEY=VALUE, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_").lower()] = value
    return values


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _INT_KEYS:
        return int(value)
    return value


@dataclass
class RunConfig:
    """Resolved parameters of one CLI invocation."""

    command: str
    values: dict

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    @property
    def geometry(self) -> BallGeometry:
        return BallGeometry(dim=self.values["dim"], radius=self.values["radius"])

    @property
    def medium(self) -> Medium:
        return Medium(
            sigma_minus=self.values["sigma_in"], sigma_plus=self.values["sigma_out"]
        )

    def echo(self) -> dict:
        return {k: v for k, v in sorted(self.values.items()) if v is not None}


def _resolve_config(command: str, cli_values: dict) -> RunConfig:
    file_values = {}
    if cli_values.get("config"):
        file_values = _read_config_file(cli_values["config"])
        unknown = set(file_values) - set(_DEFAULTS)
        if unknown:
            raise click.UsageError(
                f"unknown config file keys: {', '.join(sorted(unknown))}"
            )
    resolved = {}
    for key, default in _DEFAULTS.items():
        value = cli_values.get(key)
        if value is None:
            value = _coerce(key, file_values.get(key, default))
        resolved[key] = value
    config = RunConfig(command=command, values=resolved)
    # Fail fast on invariants before any computation starts.
    config.geometry
    config.medium
    if resolved["constraint"] not in ("volume", "perimeter"):
        raise click.UsageError("constraint must be 'volume' or 'perimeter'")
    return config


def _report(config: RunConfig, results) -> dict:
    return {
        "header": {"timestamp": datetime.now(timezone.utc).isoformat()},
        "payload": {
            "command": config.command,
            "toolkit_version": __version__,
            "config": config.echo(),
            "results": results,
        },
    }


def _emit_json(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _emit_csv(header: list, rows: list, out: Optional[str]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        click.echo(buf.getvalue(), nl=False)


def _common_options(fn):
    options = [
        click.option("--dim", type=int, default=None, help="Ambient dimension N >= 2."),
        click.option("--radius", type=float, default=None, help="Interface radius in (0, 1)."),
        click.option("--sigma-in", type=float, default=None, help="Conductivity inside the interface."),
        click.option("--sigma-out", type=float, default=None, help="Conductivity outside the interface."),
        click.option("--constraint", type=click.Choice(["volume", "perimeter"]), default=None),
        click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="KEY=VALUE file with defaults; flags win."),
        click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="Write the report here instead of stdout."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


@click.group(name="torsion")
@click.version_option(version=__version__)
def cli():
    """Shape analysis of a two-phase torsion problem on the unit ball."""


@cli.command("classify")
@_common_options
def cmd_classify(fmt, out, **cli_values):
    """Classify the concentric interface under the chosen constraint."""
    config = _resolve_config("classify", cli_values)
    geom, medium = config.geometry, config.medium
    result = classify_shape(geom, medium, config.constraint)
    volume_form = config.constraint == "volume"
    q1 = float(q_volume_values(geom, medium, 1.0)) if volume_form else float(
        q_perimeter_values(geom, medium, 1.0)
    )
    tail_k = 200.0
    tail = float(q_volume_values(geom, medium, tail_k)) if volume_form else float(
        q_perimeter_values(geom, medium, tail_k)
    )
    results = {
        "verdict": result.verdict.value,
        "critical_mode": result.critical_mode,
        "q1": q1,
        "tail_mode": tail_k,
        "tail_value": tail,
        "rigidity": torsional_rigidity_concentric(geom, medium),
    }
    click.echo(f"verdict: {result.verdict.value}")
    click.echo(f"critical_mode: {result.critical_mode}")
    click.echo(f"q(1) [{config.constraint}]: {_fmt(q1)}")
    click.echo(
        f"tail evidence: q({tail_k:g}) = {_fmt(tail)} "
        f"({'negative' if tail < 0 else 'positive'})"
    )
    if out:
        _emit_json(_report(config, results), out)


@cli.command("qcurve")
@_common_options
@click.option("--kmax", type=int, default=None, help="Largest mode order to tabulate.")
def cmd_qcurve(fmt, out, **cli_values):
    """Tabulate Q(k) and Qt(k) for k = 1..kmax."""
    config = _resolve_config("qcurve", cli_values)
    geom, medium = config.geometry, config.medium
    kmax = config.kmax
    if kmax < 1:
        raise click.UsageError("kmax must be >= 1")
    ks = np.arange(1, kmax + 1, dtype=float)
    qv = q_volume_values(geom, medium, ks)
    qp = q_perimeter_values(geom, medium, ks)
    if (fmt or "csv") == "csv":
        rows = [[str(int(k)), _fmt(v), _fmt(p)] for k, v, p in zip(ks, qv, qp)]
        _emit_csv(["k", "q_volume", "q_perimeter"], rows, out)
    else:
        results = [
            {"k": int(k), "q_volume": float(v), "q_perimeter": float(p)}
            for k, v, p in zip(ks, qv, qp)
        ]
        _emit_json(_report(config, results), out)


@cli.command("sweep")
@_common_options
@click.option("--rho-min", type=float, default=None)
@click.option("--rho-max", type=float, default=None)
@click.option("--n-rho", type=int, default=None)
@click.option("--radius-min", type=float, default=None)
@click.option("--radius-max", type=float, default=None)
@click.option("--n-radius", type=int, default=None)
def cmd_sweep(fmt, out, **cli_values):
    """Verdict phase map over the (rho, radius) plane (sigma_out fixed at 1)."""
    config = _resolve_config("sweep", cli_values)
    rhos = np.geomspace(config.rho_min, config.rho_max, config.n_rho)
    radii = np.linspace(config.radius_min, config.radius_max, config.n_radius)
    cells = []
    for rho in rhos:
        for radius in radii:
            geom = BallGeometry(dim=config.dim, radius=float(radius))
            medium = Medium(sigma_minus=float(rho), sigma_plus=1.0)
            res = classify_shape(geom, medium, config.constraint)
            cells.append(
                {
                    "rho": float(rho),
                    "radius": float(radius),
                    "verdict": res.verdict.value,
                    "critical_mode": res.critical_mode,
                }
            )
    if (fmt or "csv") == "csv":
        rows = [
            [
                _fmt(c["rho"]),
                _fmt(c["radius"]),
                c["verdict"],
                "" if c["critical_mode"] is None else str(c["critical_mode"]),
            ]
            for c in cells
        ]
        _emit_csv(["rho", "radius", "verdict", "critical_mode"], rows, out)
    else:
        _emit_json(_report(config, cells), out)


def _verify_radial(config: RunConfig) -> list:
    records = []
    n = config.n
    for dim in (2, 3):
        for radius in (0.3, 0.5, 0.7):
            for rho in (0.5, 2.0):
                geom = BallGeometry(dim=dim, radius=radius)
                medium = Medium(sigma_minus=rho, sigma_plus=1.0)
                sol = solve_radial(geom, medium, n)
                exact = stress_function(geom, medium, sol.grid.nodes)
                err = float(
                    np.max(np.abs(sol.values - exact)) / np.max(np.abs(exact))
                )
                order = energy_observed_order(geom, medium, max(n // 8, 64))
                rich = energy_richardson(geom, medium, n)
                e_ref = torsional_rigidity_concentric(geom, medium)
                e_rel = abs(rich.extrapolated - e_ref) / abs(e_ref)
                ok = err <= 1e-6 and 1.8 <= order <= 2.2 and e_rel <= 1e-8
                records.append(
                    {
                        "config": {
                            "dim": dim, "radius": radius,
                            "sigma_in": rho, "sigma_out": 1.0, "n": n,
                        },
                        "mesh_levels": [n // 2, n, 2 * n],
                        "t_samples": [],
                        "energies": {
                            "coarse": rich.coarse,
                            "fine": rich.fine,
                            "richardson": rich.extrapolated,
                            "solution_max_rel_error": err,
                            "observed_order": order,
                        },
                        "fit": None,
                        "q_estimate": rich.extrapolated,
                        "q_analytic": e_ref,
                        "rel_error": e_rel,
                        "pass": bool(ok),
                    }
                )
    return records


def _verify_fem(config: RunConfig) -> list:
    records = []
    geom, medium = config.geometry, config.medium
    tol = VOLUME_Q_RTOL if config.constraint == "volume" else PERIMETER_Q_RTOL
    family = build_family(geom, medium, 1, config.constraint)
    ts = default_t_samples(family, config.t_max, config.n_t)
    for k in range(1, min(config.kmax, 3) + 1):
        est = estimate_q(
            geom,
            medium,
            k,
            config.constraint,
            h=config.mesh_h,
            t_list=ts,
            fit_rtol=config.fit_rtol,
        )
        record = est.to_record()
        record["config"] = config.echo() | {"k": k}
        record["pass"] = bool(est.rel_error <= tol)
        records.append(record)
    return records


@cli.command("verify")
@_common_options
@click.option("--suite", type=click.Choice(["radial", "fem", "all"]), default=None)
@click.option("--n", type=int, default=None, help="Radial cell count for the FD suite.")
@click.option("--kmax", type=int, default=None, help="FEM modes 1..min(kmax, 3).")
@click.option("--mesh-h", type=float, default=None, help="FEM coarse mesh size.")
@click.option("--t-max", type=float, default=None, help="Largest |t| in the fit window.")
@click.option("--n-t", type=int, default=None, help="Magnitudes per side in the fit window.")
@click.option("--fit-rtol", type=float, default=None, help="Fit residual threshold (relative to E0).")
def cmd_verify(fmt, out, **cli_values):
    """Run the radial and/or FEM verification suites."""
    config = _resolve_config("verify", cli_values)
    if fmt == "csv":
        raise click.UsageError("verify reports are JSON only")
    records = []
    if config.suite in ("radial", "all"):
        records.extend(_verify_radial(config))
    if config.suite in ("fem", "all"):
        records.extend(_verify_fem(config))
    all_pass = all(record["pass"] for record in records)
    _emit_json(_report(config, {"records": records, "all_pass": all_pass}), out)
    if not all_pass:
        raise NumericalError("verification suite reported failures")


def main(argv=None) -> int:
    """Console entry point with the documented exit-status contract."""
    try:
        cli.main(args=argv, prog_name="torsion", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
