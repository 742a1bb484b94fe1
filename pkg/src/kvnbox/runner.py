"""Scenario runner: parse a config, execute a named experiment, write artifacts.

Config files are flat ``key = value`` text with ``#`` comments and a single
``[scenario]`` section header naming one of: free, box, gravity, two-slit,
kappa-dial, spectrum.  Unknown keys are hard errors; every default is filled
in and echoed back into the report so a run is fully described by its own
output.

Artifacts (all comma-separated text, floats at 17 significant digits):
  report.txt           human-readable summary; one clearly marked timestamp
                       line is the only nondeterministic content
  observables.csv      per-time norm, <q>, <p>, <H>
  density_t<k>.csv     long-format (q, dual, value) density snapshots
  spectrum_bands.csv   (n, kappa, energy) rows            [spectrum]
  spectrum_quantum.csv (n, energy, energy_fd) rows        [spectrum]
  contraction.csv      (kappa, l1) rows                   [kappa-dial]
  two_slit_pattern.csv (x, density) final quantum pattern [two-slit]
  manifest.txt         one line per emitted file with its columns

Exit codes: 0 success, 1 physics-check failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import math
import sys
import time as _time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .boundary import qparity_check
from .evolution import (
    evolve_box,
    evolve_free_spectral,
    evolve_gravity,
    harmonic_potential,
    quartic_potential,
)
from .grids import GridSpec, Representation, UnitSystem
from .kappa import (
    Grid1D,
    PhaseSpaceGaussian,
    contraction_experiment,
    matched_gaussian_packet,
    two_point_residual,
    two_slit_compare,
)
from .oracle import (
    BoxScenario,
    FreeScenario,
    GravityScenario,
    compare_densities,
    density_estimate,
    integrate_hamilton,
    monte_carlo_l1_budget,
    sample_ensemble,
)
from .spectral import band_energy, quantum_box_levels, quantum_box_levels_fd
from .states import (
    expectation_hamiltonian,
    expectation_momentum,
    expectation_position,
    make_gaussian_state,
    norm,
    to_dual,
)

__all__ = ["ConfigError", "ScenarioConfig", "RunReport", "parse_config", "run_scenario", "main"]

SCENARIOS = ("free", "box", "gravity", "two-slit", "kappa-dial", "spectrum")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration (exit code 2)."""


# ---------------------------------------------------------------------------
# Config schema
# ---------------------------------------------------------------------------

def _parse_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise ConfigError(f"malformed number {s!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"non-finite number {s!r}")
    return v


def _parse_int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"malformed integer {s!r}") from None


def _parse_float_list(s: str) -> list[float]:
    items = [p.strip() for p in s.split(",") if p.strip()]
    if not items:
        raise ConfigError("empty list")
    return [_parse_float(p) for p in items]


def _parse_str(s: str) -> str:
    return s


_REQUIRED = object()

_GRID_KEYS = {
    "q_min": (_parse_float, _REQUIRED),
    "q_max": (_parse_float, _REQUIRED),
    "n_q": (_parse_int, 256),
    "p_min": (_parse_float, _REQUIRED),
    "p_max": (_parse_float, _REQUIRED),
    "n_p": (_parse_int, 256),
    "hbar": (_parse_float, 1.0),
    "mass": (_parse_float, 1.0),
}

_COMMON_KEYS = {
    "seed": (_parse_int, 12345),
    "output_dir": (_parse_str, ""),
}

_TRANSPORT_KEYS = {
    **_GRID_KEYS,
    **_COMMON_KEYS,
    "times": (_parse_float_list, _REQUIRED),
    "q0": (_parse_float, _REQUIRED),
    "p0": (_parse_float, _REQUIRED),
    "sigma_q": (_parse_float, _REQUIRED),
    "sigma_p": (_parse_float, _REQUIRED),
    "n_samples": (_parse_int, 100000),
}

_SCHEMA: dict[str, dict[str, tuple[Callable[[str], object], object]]] = {
    "free": dict(_TRANSPORT_KEYS),
    "box": {**_TRANSPORT_KEYS, "L": (_parse_float, 1.0)},
    "gravity": {**_TRANSPORT_KEYS, "g": (_parse_float, -1.0)},
    "two-slit": {
        **_COMMON_KEYS,
        "slit_separation": (_parse_float, 2.6),
        "slit_width": (_parse_float, 0.15),
        "momentum_spread": (_parse_float, 0.3),
        "t_final": (_parse_float, 0.5),
        "n_q": (_parse_int, 512),
        "n_p": (_parse_int, 256),
        "n_x": (_parse_int, 1024),
        "hbar": (_parse_float, 1.0),
        "mass": (_parse_float, 1.0),
    },
    "kappa-dial": {
        **_COMMON_KEYS,
        "kappa_values": (_parse_float_list, [0.4, 0.2, 0.1]),
        "t_final": (_parse_float, 1.0),
        "potential": (_parse_str, "quartic"),
        "x_min": (_parse_float, -5.0),
        "x_max": (_parse_float, 5.0),
        "n_x": (_parse_int, 512),
        "q0": (_parse_float, 1.0),
        "p0": (_parse_float, 0.0),
        "sigma_q": (_parse_float, 0.5),
        "sigma_p": (_parse_float, 0.4),
        "hbar": (_parse_float, 1.0),
        "mass": (_parse_float, 1.0),
    },
    "spectrum": {
        **_COMMON_KEYS,
        "L": (_parse_float, 1.0),
        "n_max": (_parse_int, 3),
        "kappa_values": (_parse_float_list, [round(0.1 * i, 10) for i in range(11)]),
        "hbar": (_parse_float, 1.0),
        "mass": (_parse_float, 1.0),
    },
}

_SCENARIO_DEFAULTS: dict[str, dict[str, str]] = {
    "free": {
        "q_min": "-6", "q_max": "6", "p_min": "-6.4", "p_max": "6.4",
        "times": "0.25, 0.75, 2.0", "q0": "-2.0", "p0": "1.0",
        "sigma_q": "0.15", "sigma_p": "0.2",
    },
    "box": {
        "q_min": "0", "q_max": "1", "p_min": "-12.8", "p_max": "12.8",
        "times": "0.25, 0.75, 2.0", "q0": "0.5", "p0": "1.0",
        "sigma_q": "0.05", "sigma_p": "0.32",
    },
    "gravity": {
        "q_min": "-7", "q_max": "3", "p_min": "-6.4", "p_max": "6.4",
        "times": "0.25, 0.75, 2.0", "q0": "0.5", "p0": "0.0",
        "sigma_q": "0.15", "sigma_p": "0.2",
    },
    "two-slit": {},
    "kappa-dial": {},
    "spectrum": {},
}


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict
    echo: dict[str, str]
    overrides: list[str] = field(default_factory=list)


@dataclass
class RunReport:
    scenario: str
    version: str
    config_echo: dict[str, str]
    overrides: list[str]
    observables: list[dict] = field(default_factory=list)
    wall_reports: list[dict] = field(default_factory=list)
    oracle_metrics: list[dict] = field(default_factory=list)
    spectrum_bands: list[tuple] = field(default_factory=list)
    spectrum_quantum: list[tuple] = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    checks: list[tuple[str, bool, float]] = field(default_factory=list)
    files: list[tuple[str, str]] = field(default_factory=list)
    duration_seconds: float = 0.0

    @property
    def physics_ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def add_check(self, name: str, ok: bool, value: float) -> None:
        self.checks.append((name, bool(ok), float(value)))


def parse_config(text: str) -> ScenarioConfig:
    """Parse the flat key = value format; every problem names its line."""
    scenario: str | None = None
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("[") and body.endswith("]"):
            if scenario is not None:
                raise ConfigError(f"line {lineno}: second section header {body!r}")
            scenario = body[1:-1].strip()
            if scenario not in SCENARIOS:
                raise ConfigError(
                    f"line {lineno}: unknown scenario {scenario!r} "
                    f"(expected one of {', '.join(SCENARIOS)})"
                )
            continue
        if scenario is None:
            raise ConfigError(f"line {lineno}: expected a [scenario] header first")
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {body!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = (value, lineno)
    if scenario is None:
        raise ConfigError("config declares no [scenario] section")

    schema = _SCHEMA[scenario]
    defaults = _SCENARIO_DEFAULTS[scenario]
    params: dict = {}
    echo: dict[str, str] = {"scenario": scenario}
    for key, (value, lineno) in raw.items():
        if key not in schema:
            raise ConfigError(f"line {lineno}: unknown key {key!r} for scenario '{scenario}'")
    for key, (parser, default) in schema.items():
        if key in raw:
            value, lineno = raw[key]
            try:
                params[key] = parser(value)
            except ConfigError as exc:
                raise ConfigError(f"line {lineno}: key {key!r}: {exc}") from None
            echo[key] = value
        elif key in defaults:
            params[key] = parser(defaults[key])
            echo[key] = defaults[key]
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key {key!r} for scenario '{scenario}'")
        else:
            params[key] = default
            echo[key] = _fmt_value(default)

    if "times" in params:
        times = params["times"]
        if any(t < 0 for t in times) or any(
            t2 <= t1 for t1, t2 in zip(times, times[1:])
        ):
            raise ConfigError(f"times must be strictly increasing and >= 0, got {times}")
    if not params.get("output_dir"):
        params["output_dir"] = f"runs/{scenario}"
        echo["output_dir"] = params["output_dir"]
    return ScenarioConfig(scenario=scenario, params=params, echo=echo)


def _fmt_value(v) -> str:
    if isinstance(v, list):
        return ", ".join(_fmt_value(x) for x in v)
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# Artifact writers
# ---------------------------------------------------------------------------

def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_density(path: Path, grid: GridSpec, density: np.ndarray) -> None:
    q = np.repeat(grid.q, grid.n_dual)
    d = np.tile(grid.dual, grid.n_q)
    vals = density.ravel()
    lines = ["q,dual,value"]
    lines.extend(
        f"{_fmt(a)},{_fmt(b)},{_fmt(c)}" for a, b, c in zip(q, d, vals)
    )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Scenario implementations
# ---------------------------------------------------------------------------

def _transport_setup(params: dict):
    units = UnitSystem(hbar=params["hbar"], mass=params["mass"])
    grid = GridSpec(
        params["q_min"], params["q_max"], params["n_q"],
        params["p_min"], params["p_max"], params["n_p"], units,
    )
    state = make_gaussian_state(
        grid, Representation.POSITION_MOMENTUM,
        params["q0"], params["p0"], params["sigma_q"], params["sigma_p"],
    )
    return grid, state


def _run_transport(config: ScenarioConfig, out: Path, report: RunReport) -> None:
    params = config.params
    grid, initial = _transport_setup(params)
    mass = params["mass"]
    scenario = config.scenario
    length = params.get("L")
    g = params.get("g")

    if scenario == "free":
        evolve = lambda st, t: evolve_free_spectral(st, t)
        oracle_kind = FreeScenario()
        potential = None
    elif scenario == "box":
        evolve = lambda st, t: evolve_box(st, t, length)
        oracle_kind = BoxScenario(length)
        potential = None
    else:
        evolve = lambda st, t: evolve_gravity(st, t, g)
        # the trajectory oracle uses V = m g q, so its g is the negated acceleration
        oracle_kind = GravityScenario(-g)
        potential = lambda q: -mass * g * q

    ensemble0 = sample_ensemble(initial.density(), grid, params["n_samples"], params["seed"])
    worst_parity = 0.0
    worst_current = 0.0
    worst_norm_drift = 0.0
    for k, t in enumerate(params["times"]):
        state_t = evolve(initial, t)
        n = norm(state_t)
        worst_norm_drift = max(worst_norm_drift, abs(n - 1.0))
        obs = {
            "time": t,
            "norm": n,
            "q_mean": expectation_position(state_t),
            "p_mean": expectation_momentum(state_t),
            "h_mean": expectation_hamiltonian(state_t, potential),
        }
        report.observables.append(obs)

        ens_t = integrate_hamilton(ensemble0, t, oracle_kind, mass=mass)
        est = density_estimate(ens_t, grid)
        cmp_ = compare_densities(est.values, state_t.density(), grid)
        budget = monte_carlo_l1_budget(params["n_samples"], est.occupied_cells)
        report.oracle_metrics.append(
            {
                "time": t,
                "l1": cmp_.l1,
                "linf": cmp_.linf,
                "budget": budget,
                "occupied_cells": est.occupied_cells,
                "out_of_range": est.out_of_range_fraction,
            }
        )
        report.add_check(f"oracle_l1_within_budget_t{k}", cmp_.l1 <= budget, cmp_.l1)

        if scenario == "box":
            walls = qparity_check(to_dual(state_t), length)
            for name, w in walls.items():
                report.wall_reports.append(
                    {
                        "time": t,
                        "wall": name,
                        "parity_asymmetry": w.max_parity_asymmetry,
                        "wall_current": w.max_wall_current,
                    }
                )
                worst_parity = max(worst_parity, w.max_parity_asymmetry)
                worst_current = max(worst_current, w.max_wall_current)

        fname = f"density_t{k}.csv"
        _write_density(out / fname, grid, state_t.density())
        report.files.append((fname, "q,dual,value density snapshot at time index "
                             f"{k} (t = {_fmt(t)})"))

    report.add_check("norm_preserved_1e-10", worst_norm_drift <= 1e-10, worst_norm_drift)
    if scenario == "box":
        report.add_check("wall_parity_1e-8", worst_parity <= 1e-8, worst_parity)
        report.add_check("wall_current_1e-8", worst_current <= 1e-8, worst_current)

    _write_csv(
        out / "observables.csv",
        "time,norm,q_mean,p_mean,h_mean",
        [
            (o["time"], o["norm"], o["q_mean"], o["p_mean"], o["h_mean"])
            for o in report.observables
        ],
    )
    report.files.append(("observables.csv", "time,norm,q_mean,p_mean,h_mean"))


def _run_spectrum(config: ScenarioConfig, out: Path, report: RunReport) -> None:
    p = config.params
    hbar, mass, L = p["hbar"], p["mass"], p["L"]
    for n in range(1, p["n_max"] + 1):
        for kap in p["kappa_values"]:
            report.spectrum_bands.append((n, kap, band_energy(n, kap, L, hbar, mass)))
    levels = quantum_box_levels(p["n_max"], L, hbar, mass)
    fd = quantum_box_levels_fd(p["n_max"], L, hbar=hbar, mass=mass)
    for lvl, fd_e in zip(levels, fd):
        report.spectrum_quantum.append((lvl.n, lvl.energy, float(fd_e)))

    e1 = levels[0].energy
    expected = (math.pi * hbar / L) ** 2 / (2 * mass)
    report.add_check("quantum_E1_formula", abs(e1 - expected) <= 1e-12 * expected, e1)
    fd_err = max(abs(f - l.energy) / l.energy for f, l in zip(fd, levels))
    report.add_check("quantum_fd_cross_check_1e-6", fd_err <= 1e-6, fd_err)

    _write_csv(out / "spectrum_bands.csv", "n,kappa,energy", report.spectrum_bands)
    _write_csv(out / "spectrum_quantum.csv", "n,energy,energy_fd", report.spectrum_quantum)
    report.files.append(("spectrum_bands.csv", "n,kappa,energy"))
    report.files.append(("spectrum_quantum.csv", "n,energy,energy_fd (matrix cross-check)"))


def _run_two_slit(config: ScenarioConfig, out: Path, report: RunReport) -> None:
    p = config.params
    res = two_slit_compare(
        p["slit_separation"], p["slit_width"], p["momentum_spread"], p["t_final"],
        n_q=p["n_q"], n_p=p["n_p"], n_x=p["n_x"], hbar=p["hbar"], mass=p["mass"],
    )
    report.extras["kvn_cross_term_max"] = res.kvn_cross_term_max
    report.extras["quantum_fringe_visibility"] = res.quantum_fringe_visibility
    report.add_check("kvn_cross_term_1e-12", res.kvn_cross_term_max <= 1e-12,
                     res.kvn_cross_term_max)
    report.add_check("quantum_visibility_0.5", res.quantum_fringe_visibility >= 0.5,
                     res.quantum_fringe_visibility)

    # final quantum pattern, recomputed deterministically for plotting
    from .kappa import WaveFunction1D, evolve_schrodinger_kappa, Grid1D as _G1  # local reuse
    from .evolution import PotentialSpec as _PS
    span = abs(p["slit_separation"]) / 2 + 10 * p["slit_width"] + 6 * (
        p["hbar"] * p["t_final"] / (2 * p["mass"] * p["slit_width"])) + 1.0
    g1 = _G1(-span, span, p["n_x"])
    x = g1.x
    centers = [0.0] if p["slit_separation"] == 0 else [-p["slit_separation"] / 2, p["slit_separation"] / 2]
    fld = sum(np.exp(-((x - c) ** 2) / (4 * p["slit_width"] ** 2)).astype(complex) for c in centers)
    wf = WaveFunction1D(g1, fld, p["hbar"])
    wf = WaveFunction1D(g1, wf.amplitudes / wf.norm(), p["hbar"])
    zero = _PS(v=lambda q: np.zeros_like(q), v_prime=lambda q: np.zeros_like(q))
    wf_t = evolve_schrodinger_kappa(wf, zero, p["t_final"] / 128, 128, p["mass"])
    _write_csv(out / "two_slit_pattern.csv", "x,density", zip(x, wf_t.density()))
    report.files.append(("two_slit_pattern.csv", "x,density of the quantum branch at t_final"))


def _run_kappa_dial(config: ScenarioConfig, out: Path, report: RunReport) -> None:
    p = config.params
    if p["potential"] == "quartic":
        potential = quartic_potential(0.25)
    elif p["potential"] == "harmonic":
        potential = harmonic_potential(p["mass"], 1.0)
    else:
        raise ConfigError(f"unknown potential {p['potential']!r} (quartic or harmonic)")
    grid = Grid1D(p["x_min"], p["x_max"], p["n_x"])
    moments = PhaseSpaceGaussian(p["q0"], p["p0"], p["sigma_q"], p["sigma_p"])
    result = contraction_experiment(
        potential, p["kappa_values"], p["t_final"], moments, grid,
        hbar=p["hbar"], mass=p["mass"],
    )
    residuals = []
    for kap in p["kappa_values"]:
        psi = matched_gaussian_packet(grid, moments, kap * p["hbar"])
        residuals.append(two_point_residual(psi, potential, 1e-4, p["mass"]))
    report.extras["contraction"] = result.rows
    report.extras["two_point_residuals"] = residuals
    monotone_required = len(result.rows) > 1
    report.add_check(
        "contraction_strictly_decreasing",
        result.strictly_decreasing or not monotone_required,
        result.rows[-1][1] if result.rows else 0.0,
    )
    report.add_check(
        "two_point_residual_1e-5", max(residuals) <= 1e-5 if residuals else True,
        max(residuals) if residuals else 0.0,
    )
    _write_csv(out / "contraction.csv", "kappa,l1_distance", result.rows)
    report.files.append(("contraction.csv", "kappa,l1_distance to the classical flow"))


_RUNNERS = {
    "free": _run_transport,
    "box": _run_transport,
    "gravity": _run_transport,
    "spectrum": _run_spectrum,
    "two-slit": _run_two_slit,
    "kappa-dial": _run_kappa_dial,
}


# ---------------------------------------------------------------------------
# Report rendering and entry points
# ---------------------------------------------------------------------------

def _render_report(report: RunReport) -> str:
    lines = ["# kvnbox run report"]
    stamp = datetime.now(timezone.utc).isoformat()
    lines.append(
        f"# timestamp (excluded from golden comparison): {stamp} | "
        f"duration_seconds = {report.duration_seconds:.3f}"
    )
    lines.append(f"version = {report.version}")
    lines.append("")
    lines.append("[config]")
    for k in sorted(report.config_echo):
        lines.append(f"{k} = {report.config_echo[k]}")
    for o in report.overrides:
        lines.append(f"# override: {o}")
    if report.observables:
        lines.append("")
        lines.append("[observables]")
        lines.append("time,norm,q_mean,p_mean,h_mean")
        for o in report.observables:
            lines.append(
                ",".join(_fmt(o[k]) for k in ("time", "norm", "q_mean", "p_mean", "h_mean"))
            )
    if report.oracle_metrics:
        lines.append("")
        lines.append("[oracle]")
        lines.append("time,l1,linf,budget,occupied_cells,out_of_range")
        for m in report.oracle_metrics:
            lines.append(
                ",".join(
                    _fmt(m[k])
                    for k in ("time", "l1", "linf", "budget", "occupied_cells", "out_of_range")
                )
            )
    if report.wall_reports:
        lines.append("")
        lines.append("[walls]")
        lines.append("time,wall,parity_asymmetry,wall_current")
        for w in report.wall_reports:
            lines.append(
                f"{_fmt(w['time'])},{w['wall']},{_fmt(w['parity_asymmetry'])},"
                f"{_fmt(w['wall_current'])}"
            )
    for key, val in sorted(report.extras.items()):
        lines.append("")
        lines.append(f"[{key}]")
        if isinstance(val, list):
            for row in val:
                if isinstance(row, (tuple, list)):
                    lines.append(",".join(_fmt(v) for v in row))
                else:
                    lines.append(_fmt(row))
        else:
            lines.append(_fmt(val))
    lines.append("")
    lines.append("[checks]")
    for name, ok, value in report.checks:
        lines.append(f"{name} = {'PASS' if ok else 'FAIL'} ({_fmt(value)})")
    lines.append("")
    return "\n".join(lines)


def _render_manifest(report: RunReport) -> str:
    lines = ["# files emitted by this run"]
    lines.append("report.txt: human-readable summary; timestamp line excluded from golden comparison")
    for name, desc in report.files:
        lines.append(f"{name}: {desc}")
    lines.append("manifest.txt: this file")
    return "\n".join(lines) + "\n"


def run_scenario(
    config: ScenarioConfig,
    output_dir: str | None = None,
    quiet: bool = False,
) -> RunReport:
    """Execute the configured scenario, write artifacts, return the report."""
    t0 = _time.perf_counter()
    out = Path(output_dir if output_dir is not None else config.params["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    report = RunReport(
        scenario=config.scenario,
        version=__version__,
        config_echo=dict(config.echo),
        overrides=list(config.overrides),
    )
    _RUNNERS[config.scenario](config, out, report)
    report.duration_seconds = _time.perf_counter() - t0
    (out / "report.txt").write_text(_render_report(report), encoding="utf-8")
    (out / "manifest.txt").write_text(_render_manifest(report), encoding="utf-8")
    if not quiet:
        for name, ok, value in report.checks:
            print(f"{'PASS' if ok else 'FAIL'} {name} ({value:.6g})")
        print(f"wrote {out}/report.txt")
    return report


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="kvn-run", description="Run a configured scenario and write artifacts."
    )
    parser.add_argument("--config", required=True, help="path to a scenario config file")
    parser.add_argument("--output", default=None, help="output directory override")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
        if args.seed is not None and "seed" in config.params:
            config.overrides.append(
                f"seed: file={config.echo.get('seed')} flag={args.seed}"
            )
            config.params["seed"] = args.seed
            config.echo["seed"] = str(args.seed)
        if args.output is not None:
            config.overrides.append(
                f"output_dir: file={config.echo.get('output_dir')} flag={args.output}"
            )
            config.params["output_dir"] = args.output
            config.echo["output_dir"] = args.output
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        report = run_scenario(config, output_dir=args.output, quiet=args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"[{config.scenario}] physics failure: {exc}", file=sys.stderr)
        return 1
    return 0 if report.physics_ok else 1


def console_main() -> None:
    sys.exit(main())
