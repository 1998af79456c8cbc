"""Experiment runner: config parsing, the three numerical experiments, and
CSV emission.

Config files are flat INI text; every key has a built-in default matching
the reference scenario, so `nfradar validate-spa` with no config reproduces
the standard validation run. Output CSVs carry the effective configuration
as a leading comment block and contain nothing nondeterministic, so a rerun
with the same config and seed is byte-identical.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import io
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .em_exact import QuadratureSpec, exact_received_signal
from .em_spa import spa_received_signal
from .estimator import ModelKind, ambiguity, crb, half_power_width
from .scenario import Scenario, all_pairs
from .signal import (DEFAULT_EXACT_CARRIER_CEILING, WaveformRef, add_awgn,
                     synthesize)

EXPERIMENTS = ("validate-spa", "ambiguity", "crb")
SWEEPABLE = ("bandwidth", "carrier_freq", "range")

_SCENARIO_DEFAULTS = (
    ("n_antennas", "13"),
    ("spacing", "0.125"),
    ("antenna_gain_factor", "1.0"),
    ("bandwidth", "100000000.0"),
    ("carrier_freq", "77000000000.0"),
    ("plate_width", "0.8"),
    ("plate_height", "1.75"),
    ("range", "4.0"),
    ("free_space_impedance", "376.730313668"),
    ("min_range_wavelengths", "100.0"),
)

_EXPERIMENT_DEFAULTS = (
    ("model", "auto"),
    ("coherence", "coherent"),
    ("snr", "1.0"),
    ("snr_normalization", "total"),
    ("validation_carrier", "10000000000.0"),
    ("exact_carrier_ceiling", repr(DEFAULT_EXACT_CARRIER_CEILING)),
    ("quad_points_per_wavelength", "10.0"),
)

_GRID_DEFAULTS = (("min", "2.0"), ("max", "8.0"), ("step", "auto"))
_NOISE_DEFAULTS = (("noise_power", "0.0"), ("seed", "0"))
_OUTPUT_DEFAULTS = (("path", ""),)

_SECTIONS = {
    "scenario": _SCENARIO_DEFAULTS,
    "experiment": _EXPERIMENT_DEFAULTS,
    "sweep": (),
    "grid": _GRID_DEFAULTS,
    "noise": _NOISE_DEFAULTS,
    "output": _OUTPUT_DEFAULTS,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description (defaults filled)."""

    scenario: Scenario
    experiment: str
    sweep: tuple[tuple[str, tuple[float, ...]], ...]
    grid_min: float
    grid_max: float
    grid_step: float | None  # None means lambda/8 at the operating carrier
    noise_power: float
    seed: int
    output_path: str
    model: str
    coherence: str
    snr: float
    snr_normalization: str
    validation_carrier: float
    exact_carrier_ceiling: float
    quad_points_per_wavelength: float
    slow: bool = False


def _parser_with_defaults() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    for section, defaults in _SECTIONS.items():
        cp.add_section(section)
        for key, value in defaults:
            cp.set(section, key, value)
    return cp


def parse_config(path: str | None = None,
                 overrides: tuple[str, ...] = (),
                 experiment: str = "ambiguity",
                 slow: bool = False,
                 text: str | None = None) -> ExperimentConfig:
    """Builds an ExperimentConfig from an optional INI file plus
    section.key=value override strings (later wins)."""
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}")
    cp = _parser_with_defaults()
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    if text is not None:
        cp.read_string(text)
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not section.key=value")
        target, value = item.split("=", 1)
        if "." not in target:
            raise ValueError(f"override {item!r} is not section.key=value")
        section, key = (part.strip() for part in target.split(".", 1))
        if not cp.has_section(section):
            raise ValueError(f"unknown config section {section!r}")
        cp.set(section, key, value.strip())

    for section in cp.sections():
        if section not in _SECTIONS:
            raise ValueError(f"unknown config section {section!r}")
        known = {k for k, _ in _SECTIONS[section]}
        if section == "sweep":
            continue
        for key in cp.options(section):
            if key not in known:
                raise ValueError(
                    f"unknown key {key!r} in section [{section}]")

    sc = cp["scenario"]
    scenario = Scenario(
        n_antennas=sc.getint("n_antennas"),
        spacing=sc.getfloat("spacing"),
        antenna_gain_factor=sc.getfloat("antenna_gain_factor"),
        bandwidth=sc.getfloat("bandwidth"),
        carrier_freq=sc.getfloat("carrier_freq"),
        plate_width=sc.getfloat("plate_width"),
        plate_height=sc.getfloat("plate_height"),
        range=sc.getfloat("range"),
        free_space_impedance=sc.getfloat("free_space_impedance"),
        min_range_wavelengths=sc.getfloat("min_range_wavelengths"),
    )

    sweep = []
    for key in cp.options("sweep"):
        if key not in SWEEPABLE:
            raise ValueError(
                f"sweep parameter {key!r} is not a sweepable Scenario field "
                f"(choose from {', '.join(SWEEPABLE)})")
        values = tuple(float(v) for v in cp.get("sweep", key).split(","))
        if not values:
            raise ValueError(f"sweep parameter {key!r} has no values")
        sweep.append((key, values))
    sweep.sort()  # deterministic order regardless of file order

    grid_min = cp.getfloat("grid", "min")
    grid_max = cp.getfloat("grid", "max")
    if not grid_min < grid_max:
        raise ValueError("grid min must be below grid max")
    step_text = cp.get("grid", "step")
    if step_text == "auto":
        grid_step = None
    else:
        grid_step = float(step_text)
        if grid_step <= 0:
            raise ValueError("grid step must be positive")

    ex = cp["experiment"]
    model = ex.get("model")
    if model not in ("auto", "full", "partial"):
        raise ValueError(f"unknown model {model!r}")
    coherence = ex.get("coherence")
    if coherence not in ("coherent", "incoherent"):
        raise ValueError(f"unknown coherence {coherence!r}")
    snr_norm = ex.get("snr_normalization")
    if snr_norm not in ("total", "per_pair"):
        raise ValueError(f"unknown snr_normalization {snr_norm!r}")

    return ExperimentConfig(
        scenario=scenario,
        experiment=experiment,
        sweep=tuple(sweep),
        grid_min=grid_min,
        grid_max=grid_max,
        grid_step=grid_step,
        noise_power=cp.getfloat("noise", "noise_power"),
        seed=cp.getint("noise", "seed"),
        output_path=cp.get("output", "path"),
        model=model,
        coherence=coherence,
        snr=ex.getfloat("snr"),
        snr_normalization=snr_norm,
        validation_carrier=ex.getfloat("validation_carrier"),
        exact_carrier_ceiling=ex.getfloat("exact_carrier_ceiling"),
        quad_points_per_wavelength=ex.getfloat("quad_points_per_wavelength"),
        slow=slow,
    )


def emit_config(cfg: ExperimentConfig) -> str:
    """Effective configuration as INI text; parse_config(text=...) of the
    result reproduces cfg exactly (round-trip idempotency)."""
    sc = cfg.scenario
    lines = ["[scenario]"]
    lines.append(f"n_antennas = {sc.n_antennas}")
    for name in ("spacing", "antenna_gain_factor", "bandwidth",
                 "carrier_freq", "plate_width", "plate_height", "range",
                 "free_space_impedance", "min_range_wavelengths"):
        lines.append(f"{name} = {getattr(sc, name)!r}")
    lines.append("")
    lines.append("[experiment]")
    lines.append(f"model = {cfg.model}")
    lines.append(f"coherence = {cfg.coherence}")
    lines.append(f"snr = {cfg.snr!r}")
    lines.append(f"snr_normalization = {cfg.snr_normalization}")
    lines.append(f"validation_carrier = {cfg.validation_carrier!r}")
    lines.append(f"exact_carrier_ceiling = {cfg.exact_carrier_ceiling!r}")
    lines.append(
        f"quad_points_per_wavelength = {cfg.quad_points_per_wavelength!r}")
    lines.append("")
    lines.append("[sweep]")
    for name, values in cfg.sweep:
        lines.append(f"{name} = {','.join(repr(v) for v in values)}")
    lines.append("")
    lines.append("[grid]")
    lines.append(f"min = {cfg.grid_min!r}")
    lines.append(f"max = {cfg.grid_max!r}")
    step = "auto" if cfg.grid_step is None else repr(cfg.grid_step)
    lines.append(f"step = {step}")
    lines.append("")
    lines.append("[noise]")
    lines.append(f"noise_power = {cfg.noise_power!r}")
    lines.append(f"seed = {cfg.seed}")
    lines.append("")
    lines.append("[output]")
    lines.append(f"path = {cfg.output_path}")
    return "\n".join(lines) + "\n"


def _range_grid(cfg: ExperimentConfig, scenario: Scenario) -> np.ndarray:
    step = cfg.grid_step
    if step is None:
        step = scenario.wavelength / 8.0
    n = int(np.floor((cfg.grid_max - cfg.grid_min) / step + 1e-9)) + 1
    return cfg.grid_min + step * np.arange(n)


def _scenario_variant(scenario: Scenario, param: str, value: float) -> Scenario:
    return dataclasses.replace(scenario, **{param: value})


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def run_validate_spa(cfg: ExperimentConfig):
    """Exact-vs-closed-form comparison, one row per pair.

    Uses the constant waveform and, unless slow mode is on, replaces the
    configured carrier with the cheaper validation carrier.
    """
    scenario = cfg.scenario
    if not cfg.slow and scenario.carrier_freq > cfg.validation_carrier:
        scenario = dataclasses.replace(
            scenario, carrier_freq=cfg.validation_carrier)
    ceiling = np.inf if cfg.slow else cfg.exact_carrier_ceiling
    if scenario.carrier_freq > ceiling:
        raise ValueError(
            f"exact backend refused at carrier {scenario.carrier_freq:g} Hz "
            "without --slow")
    quad = QuadratureSpec(
        points_per_wavelength=cfg.quad_points_per_wavelength)
    waveform = WaveformRef.constant()
    columns = ["tx", "rx", "exact_db", "spa_db", "amp_err_db",
               "phase_err_deg"]
    rows = []
    for pair in all_pairs(scenario):
        u_exact = exact_received_signal(pair, scenario, 0.0, waveform, quad)
        u_spa = complex(spa_received_signal(pair, scenario, 0.0, waveform))
        exact_db = 20.0 * np.log10(abs(u_exact))
        spa_db = 20.0 * np.log10(abs(u_spa)) if u_spa != 0 else -np.inf
        amp_err = spa_db - exact_db
        phase_err = np.angle(u_spa / u_exact, deg=True)
        rows.append((pair.tx_index, pair.rx_index, exact_db, spa_db,
                     amp_err, phase_err))
    return columns, rows


def run_ambiguity(cfg: ExperimentConfig):
    """Ambiguity curves over the range grid, one sweep parameter at a time,
    plus a summary row (width, argmax) per sweep value. noise_power > 0
    perturbs the received traces with the configured seed (the same root
    seed for every sweep value)."""
    if len(cfg.sweep) > 1:
        raise ValueError(
            "ambiguity sweeps one parameter at a time; got "
            + ", ".join(name for name, _ in cfg.sweep))
    kind = ModelKind.parse(cfg.model if cfg.model != "auto" else "partial")
    if cfg.sweep:
        param, values = cfg.sweep[0]
    else:
        param, values = "range", (cfg.scenario.range,)
    columns = ["row_kind", "sweep_param", "sweep_value", "r_hat", "value",
               "width", "argmax"]
    rows = []
    for value in values:
        scenario = _scenario_variant(cfg.scenario, param, value)
        grid = _range_grid(cfg, scenario)
        received = synthesize(scenario)
        if cfg.noise_power > 0:
            received = add_awgn(received, cfg.noise_power, cfg.seed)
        curve = ambiguity(scenario, scenario.range, grid, kind,
                          cfg.coherence, received=received)
        for r_hat, v in zip(curve.grid, curve.values):
            rows.append(("curve", param, value, r_hat, v, "", ""))
        try:
            width = half_power_width(curve)
        except ValueError:
            # grids too narrow (or too noisy) to bracket the half-power
            # crossings still produce valid curve rows; the summary just
            # has no width to report
            width = ""
        est = float(curve.grid[int(np.argmax(curve.values))])
        rows.append(("summary", param, value, "", "", width, est))
    return columns, rows


def run_crb(cfg: ExperimentConfig):
    """Bound vs range per (carrier, bandwidth) line; rows sorted."""
    kind = ModelKind.parse(cfg.model if cfg.model != "auto" else "full")
    sweep = dict(cfg.sweep)
    carriers = sweep.get("carrier_freq", (cfg.scenario.carrier_freq,))
    bandwidths = sweep.get("bandwidth", (cfg.scenario.bandwidth,))
    ranges = sweep.get("range")
    if ranges is None:
        ranges = tuple(_range_grid(cfg, cfg.scenario))
    columns = ["carrier_freq", "bandwidth", "range", "crb", "curvature"]
    rows = []
    for fc in sorted(carriers):
        for bw in sorted(bandwidths):
            scenario = dataclasses.replace(
                cfg.scenario, carrier_freq=fc, bandwidth=bw)
            for R in sorted(ranges):
                result = crb(scenario, R, kind, snr=cfg.snr,
                             snr_normalization=cfg.snr_normalization,
                             coherence=cfg.coherence)
                rows.append((fc, bw, R, result.bound, result.curvature))
    return columns, rows


_RUNNERS = {
    "validate-spa": run_validate_spa,
    "ambiguity": run_ambiguity,
    "crb": run_crb,
}


def write_table(path: str, columns, rows, cfg: ExperimentConfig) -> None:
    """CSV with a comment block recording tool version and effective
    config. No timestamps or environment state: reruns are byte-identical."""
    buf = io.StringIO()
    buf.write(f"# nfradar {__version__}\n")
    buf.write(f"# experiment: {cfg.experiment}\n")
    for line in emit_config(cfg).rstrip("\n").split("\n"):
        buf.write(f"# {line}\n" if line else "#\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(buf.getvalue())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nfradar",
        description="near-field multistatic radar experiments")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None,
                       help="INI config file (defaults reproduce the "
                            "reference scenario)")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--slow", action="store_true",
                       help="full-carrier runs (exact backend at the "
                            "configured carrier; expect long runtimes)")
        p.add_argument("--seed", type=int, default=None,
                       help="noise seed override")
        p.add_argument("--set", dest="overrides", action="append",
                       default=[], metavar="SECTION.KEY=VALUE",
                       help="config override, repeatable")
    args = parser.parse_args(argv)

    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"noise.seed={args.seed}")
    cfg = parse_config(path=args.config, overrides=tuple(overrides),
                       experiment=args.experiment, slow=args.slow)
    columns, rows = _RUNNERS[args.experiment](cfg)
    out = args.out or cfg.output_path or f"{args.experiment}.csv"
    write_table(out, columns, rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
