"""Experiment command line for the covert AF relay analysis.

Subcommands
    detection-sweep   analytic error rates (plus optional MC overlay) vs tau
    minerror-sweep    warden-optimal threshold and minimum total error vs
                      p_delta, optionally one curve per p_r_max or h_sr2
    rate-sweep        mean effective covert rate (closed form + quadrature)
                      vs p_delta with constrained-optimum markers
    optimize          constrained covert-power optimization summary

Output is CSV with ``#``-prefixed metadata lines echoing the scenario, the
derived constants, and the run settings, enough to reproduce the run
exactly. With ``--out FILE.csv`` the CSV is written to FILE.csv and a PNG
rendering is saved alongside as FILE.png (suppress with ``--no-plot``);
without ``--out`` the CSV goes to stdout. For a fixed configuration and
seed the CSV bytes are identical across runs.

Exit codes: 0 success, 2 configuration error, 3 infeasible scenario,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__, plots
from .covert_rate import (effective_rate_closed, effective_rate_quadrature,
                          optimize_covert_power)
from .detection import detection_curve, optimal_threshold
from .errors import (ConfigError, CovertPowerExceedsBudget, InfeasibleRate,
                     NoFeasibleCovertPower, QuadratureNotConverged)
from .montecarlo import simulate_detection, simulate_effective_rate
from .params import (SystemParams, derive_constants, parse_scenario_text,
                     parse_setting, scenario_from_mapping)

__all__ = ["ExperimentConfig", "Sweep", "main", "console_main",
           "read_report_header"]

_SWEEP_VARS = ("tau", "p_delta", "p_r_max", "h_sr2")
_VS_FIELDS = ("p_r_max", "h_sr2")


@dataclass(frozen=True)
class Sweep:
    """One sweep dimension: variable name, inclusive range, point count."""

    var: str
    lo: float
    hi: float
    points: int

    def __post_init__(self):
        if self.var not in _SWEEP_VARS:
            raise ConfigError(f"sweep variable must be one of "
                              f"{', '.join(_SWEEP_VARS)}, got {self.var!r}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)
                and self.lo <= self.hi):
            raise ConfigError(f"sweep range must be finite with lo <= hi, "
                              f"got {self.lo!r}:{self.hi!r}")
        if not (isinstance(self.points, int) and self.points >= 2):
            raise ConfigError(f"sweep needs at least 2 points, "
                              f"got {self.points!r}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated description of one CLI run.

    sweep is None when the command should derive its default range from the
    scenario; vs_field/vs_values describe the optional second dimension.
    """

    scenario: SystemParams
    sweep: Sweep | None
    vs_field: str | None
    vs_values: tuple[float, ...] | None
    trials: int
    seed: int
    epsilon: float
    out: Path | None
    plot: bool

    def __post_init__(self):
        if not (isinstance(self.trials, int) and self.trials >= 0):
            raise ConfigError(f"--trials must be >= 0, got {self.trials!r}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError(f"--seed must be >= 0, got {self.seed!r}")
        if not (isinstance(self.epsilon, float)
                and math.isfinite(self.epsilon)
                and 0.0 <= self.epsilon <= 1.0):
            raise ConfigError(f"--epsilon must lie in [0, 1], "
                              f"got {self.epsilon!r}")
        if self.vs_field is not None and self.vs_field not in _VS_FIELDS:
            raise ConfigError(f"--vs supports {', '.join(_VS_FIELDS)} "
                              f"(optionally _db), got {self.vs_field!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covertrelay",
        description="Covert-rate and detection analysis for an "
                    "amplify-and-forward relay under a radiometer warden.")
    parser.add_argument("--version", action="version",
                        version=f"covertrelay {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="COMMAND")

    def add_common(sp, sweep_help=None, with_vs=False, with_mc=True):
        sp.add_argument("--config", type=Path, metavar="PATH",
                        help="scenario file with 'key = value' lines")
        sp.add_argument("--set", action="append", default=[],
                        metavar="KEY=VALUE", dest="settings",
                        help="override one scenario parameter; suffix the "
                             "key with _db to give the value in decibels")
        if sweep_help:
            sp.add_argument("--sweep", metavar="LO:HI[:N]", help=sweep_help)
        if with_vs:
            sp.add_argument("--vs", metavar="KEY=V1,V2,...",
                            help="second dimension: one curve per value of "
                                 "p_r_max or h_sr2 (optionally _db)")
        if with_mc:
            sp.add_argument("--trials", type=int, default=0, metavar="N",
                            help="Monte Carlo trials per point for the "
                                 "validation overlay (0 disables it)")
        sp.add_argument("--seed", type=int, default=1, metavar="N",
                        help="master seed for Monte Carlo sampling")
        sp.add_argument("--out", type=Path, metavar="PATH",
                        help="write CSV here (default stdout); a PNG is "
                             "rendered alongside unless --no-plot")
        sp.add_argument("--no-plot", action="store_true",
                        help="do not render the PNG next to --out")

    sp = sub.add_parser("detection-sweep",
                        help="error rates vs detection threshold")
    add_common(sp, sweep_help="threshold range (default 0:1.05*rho3:101)")

    sp = sub.add_parser("minerror-sweep",
                        help="minimum total detection error vs covert power")
    add_common(sp, sweep_help="covert power range (default 0:p_delta_u:101)",
               with_vs=True, with_mc=False)

    sp = sub.add_parser("rate-sweep",
                        help="mean effective covert rate vs covert power")
    add_common(sp, sweep_help="covert power range "
                              "(default 0:0.99*p_r_max/(mu+1):50)",
               with_vs=True)
    sp.add_argument("--epsilon", type=float, default=0.1, metavar="X",
                    help="covertness level for the constrained-optimum "
                         "markers (xi_star >= 1 - X)")

    sp = sub.add_parser("optimize",
                        help="maximize the covert rate under the "
                             "covertness constraint")
    add_common(sp, with_mc=False)
    sp.add_argument("--epsilon", type=float, default=0.1, metavar="X",
                    help="covertness level (xi_star >= 1 - X)")
    return parser


def _scenario_from_args(args) -> SystemParams:
    items: dict[str, float] = {}
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read --config {args.config}: {exc}")
        items.update(parse_scenario_text(text, source=str(args.config)))
    seen: dict[str, str] = {}
    for setting in args.settings:
        where = f"--set {setting}"
        key, sep, raw = setting.partition("=")
        if not sep:
            raise ConfigError(f"{where}: expected KEY=VALUE")
        field, value = parse_setting(key.strip(), raw.strip(), where)
        if field in seen:
            raise ConfigError(f"{where}: {key.strip()!r} conflicts with "
                              f"earlier --set {seen[field]!r}")
        seen[field] = key.strip()
        items[field] = value
    return scenario_from_mapping(items)


def _parse_sweep(text: str | None, var: str,
                 default_points: int) -> Sweep | None:
    if text is None:
        return None
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"--sweep expects LO:HI[:N], got {text!r}")
    try:
        lo = float(parts[0])
        hi = float(parts[1])
        points = int(parts[2]) if len(parts) == 3 else default_points
    except ValueError:
        raise ConfigError(f"--sweep expects numeric LO:HI[:N], "
                          f"got {text!r}") from None
    return Sweep(var, lo, hi, points)


def _parse_vs(text: str | None):
    if text is None:
        return None, None
    key, sep, rest = text.partition("=")
    if not sep or not rest.strip():
        raise ConfigError(f"--vs expects KEY=V1,V2,..., got {text!r}")
    key = key.strip()
    field = key[:-3] if key.endswith("_db") else key
    if field not in _VS_FIELDS:
        raise ConfigError(f"--vs supports {', '.join(_VS_FIELDS)} "
                          f"(optionally _db), got {key!r}")
    values = []
    for token in rest.split(","):
        _, value = parse_setting(key, token.strip(), f"--vs {text}")
        values.append(value)
    return field, tuple(values)


def _config_from_args(args, sweep_var: str | None) -> ExperimentConfig:
    scenario = _scenario_from_args(args)
    sweep = None
    if sweep_var is not None and getattr(args, "sweep", None) is not None:
        default_points = 50 if args.command == "rate-sweep" else 101
        sweep = _parse_sweep(args.sweep, sweep_var, default_points)
    vs_field, vs_values = _parse_vs(getattr(args, "vs", None))
    return ExperimentConfig(
        scenario=scenario,
        sweep=sweep,
        vs_field=vs_field,
        vs_values=vs_values,
        trials=getattr(args, "trials", 0),
        seed=args.seed if hasattr(args, "seed") else 1,
        epsilon=float(getattr(args, "epsilon", 0.1)),
        out=getattr(args, "out", None),
        plot=not getattr(args, "no_plot", False),
    )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _scenario_meta(scenario: SystemParams) -> str:
    parts = [f"{f.name}={_fmt(getattr(scenario, f.name))}"
             for f in fields(SystemParams)]
    return "scenario: " + " ".join(parts)


def _derived_meta(c, label: str | None = None) -> str:
    tag = f"derived[{label}]" if label else "derived"
    keys = ("snr_target", "mu", "eta", "amp_gain", "p_delta_u", "headroom",
            "h_min_forward", "h_min_covert", "rho1", "rho2", "rho3", "p_c")
    return f"{tag}: " + " ".join(f"{k}={_fmt(getattr(c, k))}" for k in keys)


def _base_meta(command: str, cfg: ExperimentConfig) -> list[str]:
    meta = [f"covertrelay {__version__}",
            f"command: {command}",
            _scenario_meta(cfg.scenario)]
    if cfg.sweep is not None:
        meta.append(f"sweep: {cfg.sweep.var} {_fmt(cfg.sweep.lo)} "
                    f"{_fmt(cfg.sweep.hi)} {cfg.sweep.points}")
    if cfg.vs_field is not None:
        meta.append(f"vs: {cfg.vs_field} "
                    + " ".join(_fmt(v) for v in cfg.vs_values))
    meta.append(f"trials: {cfg.trials}")
    meta.append(f"seed: {cfg.seed}")
    if command in ("rate-sweep", "optimize"):
        meta.append(f"epsilon: {_fmt(cfg.epsilon)}")
    return meta


def _emit(meta: list[str], header: list[str], rows: list[list],
          cfg: ExperimentConfig) -> None:
    lines = [f"# {m}" for m in meta]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if cfg.out is not None:
        cfg.out.write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def _maybe_plot(command: str, header: list[str], rows: list[list],
                cfg: ExperimentConfig) -> None:
    if cfg.out is None or not cfg.plot:
        return
    png = cfg.out.with_suffix(".png")
    renderer = {
        "detection-sweep": plots.render_detection_sweep,
        "minerror-sweep": plots.render_minerror_sweep,
        "rate-sweep": plots.render_rate_sweep,
    }.get(command)
    if renderer is not None:
        renderer(header, rows, cfg.vs_field, png)


def _curves(cfg: ExperimentConfig):
    """(label, scenario) per vs value, or a single unlabeled curve."""
    if cfg.vs_field is None:
        return [(None, cfg.scenario)]
    return [(f"{cfg.vs_field}={_fmt(v)}",
             replace(cfg.scenario, **{cfg.vs_field: v}))
            for v in cfg.vs_values]


def _run_detection_sweep(args) -> int:
    cfg = _config_from_args(args, "tau")
    c = derive_constants(cfg.scenario)
    sweep = cfg.sweep or Sweep("tau", 0.0, 1.05 * c.rho3, 101)
    curve = detection_curve(c, sweep.grid())
    header = ["tau", "p_fa", "p_md", "xi"]
    rows = [[float(t), float(fa), float(md), float(x)]
            for t, fa, md, x in zip(curve.taus, curve.p_fa, curve.p_md,
                                    curve.xi)]
    if cfg.trials > 0:
        header += ["mc_p_fa", "mc_p_md", "mc_p_fa_half", "mc_p_md_half"]
        for i, row in enumerate(rows):
            fa = simulate_detection(cfg.scenario, row[0], 0, cfg.trials,
                                    cfg.seed + 2 * i)
            md = simulate_detection(cfg.scenario, row[0], 1, cfg.trials,
                                    cfg.seed + 2 * i + 1)
            row += [fa.value, md.value, fa.half_width, md.half_width]
    meta = _base_meta("detection-sweep", cfg)
    meta.insert(3, _derived_meta(c))
    _emit(meta, header, rows, cfg)
    _maybe_plot("detection-sweep", header, rows, cfg)
    return 0


def _run_minerror_sweep(args) -> int:
    cfg = _config_from_args(args, "p_delta")
    header = ([cfg.vs_field] if cfg.vs_field else []) + \
        ["p_delta", "tau_star", "xi_star"]
    rows = []
    derived_meta = []
    for label, scenario in _curves(cfg):
        base = derive_constants(replace(scenario, p_delta=0.0))
        derived_meta.append(_derived_meta(base, label))
        sweep = cfg.sweep or Sweep("p_delta", 0.0, base.p_delta_u, 101)
        prefix = [_vs_value(scenario, cfg)] if cfg.vs_field else []
        for p_delta in sweep.grid():
            c = derive_constants(replace(scenario, p_delta=float(p_delta)))
            found = optimal_threshold(c)
            rows.append(prefix + [float(p_delta), found.tau_star,
                                  found.xi_star])
    meta = _base_meta("minerror-sweep", cfg)
    meta[3:3] = derived_meta
    _emit(meta, header, rows, cfg)
    _maybe_plot("minerror-sweep", header, rows, cfg)
    return 0


def _vs_value(scenario: SystemParams, cfg: ExperimentConfig) -> float:
    return getattr(scenario, cfg.vs_field)


def _run_rate_sweep(args) -> int:
    cfg = _config_from_args(args, "p_delta")
    with_mc = cfg.trials > 0
    header = (["kind"] + ([cfg.vs_field] if cfg.vs_field else [])
              + ["p_delta", "r_bar_c_closed", "r_bar_c_quadrature"]
              + (["mc_r_bar_c", "mc_half_width"] if with_mc else []))
    rows = []
    derived_meta = []
    optimize_meta = []
    mc_row = 0
    for label, scenario in _curves(cfg):
        base = derive_constants(replace(scenario, p_delta=0.0))
        derived_meta.append(_derived_meta(base, label))
        limit = scenario.p_r_max / (base.mu + 1.0)
        sweep = cfg.sweep or Sweep("p_delta", 0.0, 0.99 * limit, 50)
        prefix = [_vs_value(scenario, cfg)] if cfg.vs_field else []

        def rates_at(p_delta: float) -> tuple[float, float]:
            c = derive_constants(replace(scenario, p_delta=float(p_delta)))
            return (effective_rate_closed(c).value,
                    effective_rate_quadrature(c).value)

        for p_delta in sweep.grid():
            closed, quadrature = rates_at(float(p_delta))
            row = ["curve"] + prefix + [float(p_delta), closed, quadrature]
            if with_mc:
                estimate = simulate_effective_rate(
                    replace(scenario, p_delta=float(p_delta)), cfg.trials,
                    cfg.seed + mc_row)
                mc_row += 1
                row += [estimate.value, estimate.half_width]
            rows.append(row)
        best = optimize_covert_power(scenario, cfg.epsilon)
        tag = f"optimize[{label}]" if label else "optimize"
        optimize_meta.append(
            f"{tag}: p_delta_eps={_fmt(best.p_delta_eps)} "
            f"p_delta_star={_fmt(best.p_delta_star)} "
            f"r_bar_c_star={_fmt(best.r_bar_c_star)} "
            f"binding={_fmt(best.binding)}")
        blank = ["", ""] if with_mc else []
        closed_eps, quad_eps = rates_at(best.p_delta_eps)
        rows.append(["p_delta_eps"] + prefix
                    + [best.p_delta_eps, closed_eps, quad_eps] + blank)
        _, quad_star = rates_at(best.p_delta_star)
        rows.append(["optimum"] + prefix
                    + [best.p_delta_star, best.r_bar_c_star, quad_star]
                    + blank)
    meta = _base_meta("rate-sweep", cfg)
    meta[3:3] = derived_meta
    meta.extend(optimize_meta)
    _emit(meta, header, rows, cfg)
    _maybe_plot("rate-sweep", header, rows, cfg)
    return 0


def _run_optimize(args) -> int:
    cfg = _config_from_args(args, None)
    best = optimize_covert_power(cfg.scenario, cfg.epsilon)
    c_star = derive_constants(replace(cfg.scenario,
                                      p_delta=best.p_delta_star))
    found = optimal_threshold(c_star)
    summary = [
        ("p_delta_star", best.p_delta_star),
        ("r_bar_c_star", best.r_bar_c_star),
        ("p_delta_eps", best.p_delta_eps),
        ("binding", best.binding),
        ("tau_star", found.tau_star),
        ("xi_star", found.xi_star),
    ]
    for key, value in summary:
        print(f"{key} = {_fmt(value)}")
    if cfg.out is not None:
        meta = _base_meta("optimize", cfg)
        meta.insert(3, _derived_meta(derive_constants(cfg.scenario)))
        _emit(meta, [k for k, _ in summary], [[v for _, v in summary]], cfg)
    return 0


def read_report_header(text: str) -> dict:
    """Parse the ``#`` metadata of a report back into run settings.

    Returns a dict with command, scenario (field -> linear value), sweep
    (var, lo, hi, points) or None, vs (field, values) or None, trials,
    seed, and epsilon (None when the command has none). Together with the
    defaults these reproduce the run exactly.
    """
    info = {"command": None, "scenario": {}, "sweep": None, "vs": None,
            "trials": 0, "seed": 1, "epsilon": None}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        key, sep, rest = body.partition(":")
        if not sep:
            continue
        key = key.strip()
        rest = rest.strip()
        if key == "command":
            info["command"] = rest
        elif key == "scenario":
            for part in rest.split():
                name, _, value = part.partition("=")
                info["scenario"][name] = float(value)
        elif key == "sweep":
            var, lo, hi, points = rest.split()
            info["sweep"] = (var, float(lo), float(hi), int(points))
        elif key == "vs":
            tokens = rest.split()
            info["vs"] = (tokens[0], tuple(float(t) for t in tokens[1:]))
        elif key == "trials":
            info["trials"] = int(rest)
        elif key == "seed":
            info["seed"] = int(rest)
        elif key == "epsilon":
            info["epsilon"] = float(rest)
    return info


_RUNNERS = {
    "detection-sweep": _run_detection_sweep,
    "minerror-sweep": _run_minerror_sweep,
    "rate-sweep": _run_rate_sweep,
    "optimize": _run_optimize,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _RUNNERS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleRate, CovertPowerExceedsBudget,
            NoFeasibleCovertPower) as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return 3
    except QuadratureNotConverged as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


def console_main() -> None:
    sys.exit(main())
