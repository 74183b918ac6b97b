"""Command-line interface: config ingestion, trace-distance sweeps to CSV,
path-difference estimation, divisibility reports and oracle checks.

Exit codes: 0 ok, 1 check failure, 2 config error, 3 estimator out of regime.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from importlib.resources import files

import numpy as np

from . import analysis, maps, oracle
from .core import (
    FrequencyDistribution,
    InteractionWindow,
    InterferometerConfig,
    PolarizationState,
)
from .errors import (
    ConfigError,
    EstimatorOutOfRegime,
    ImpossibleOutcome,
    PeakNotFound,
)
from .interferometer import conditional_state_outside, path_probabilities

ORACLE_CHECK_THRESHOLD = 1e-5
ORACLE_PROB_THRESHOLD = 1e-8

_WINDOW_SECTIONS = ("arm0", "arm1", "output")
_SQ2 = 1.0 / math.sqrt(2.0)
_DEFAULT_POLARIZATION = {
    "ch_re": _SQ2, "ch_im": 0.0, "cv_re": _SQ2, "cv_im": 0.0, "theta": 0.0,
}


def preset_path(name: str):
    """Path of a shipped experiment preset (dtau10, dtau2p5, dtau1p5, dtau0p5, dtau0)."""
    return files("mzdephase").joinpath("presets", f"{name}.json")


def _take_number(section, data, key, problems, *, default=None, required=True):
    if key not in data:
        if required and default is None:
            problems.append(f"{section}.{key}: missing required field")
            return None
        return default
    value = data[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        problems.append(f"{section}.{key}: expected a number, got {value!r}")
        return None
    if not math.isfinite(value):
        problems.append(f"{section}.{key}: must be finite")
        return None
    return float(value)


def _build_window(section: str, data, problems, *, output: bool) -> InteractionWindow | None:
    if not isinstance(data, dict):
        problems.append(f"{section}: expected an object")
        return None
    known = {"n_h", "n_v", "t_start", "t_stop"}
    for key in sorted(set(data) - known):
        problems.append(f"{section}.{key}: unknown field")
    n_h = _take_number(section, data, "n_h", problems)
    n_v = _take_number(section, data, "n_v", problems)
    t_start = _take_number(
        section, data, "t_start", problems,
        default=None if output else 0.0, required=output,
    )
    if output and data.get("t_stop", None) is None:
        t_stop = math.inf
    else:
        t_stop = _take_number(section, data, "t_stop", problems)
    if None in (n_h, n_v, t_start, t_stop):
        return None
    for key, value in (("n_h", n_h), ("n_v", n_v)):
        if value <= 0:
            problems.append(f"{section}.{key}: refractive index must be positive")
            return None
    if t_start < 0:
        problems.append(f"{section}.t_start: negative times are not allowed")
        return None
    if not output and not math.isfinite(t_stop):
        problems.append(f"{section}.t_stop: inside windows must close")
        return None
    try:
        return InteractionWindow(n_h, n_v, t_start, t_stop)
    except ValueError as exc:
        problems.append(f"{section}: {exc}")
        return None


def build_config(data: dict) -> tuple[InterferometerConfig, dict]:
    """Validate a parsed config document, reporting every problem at once."""
    problems: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["top level: expected an object"])
    known = {"distribution", *_WINDOW_SECTIONS, "polarization", "run"}
    for key in sorted(set(data) - known):
        problems.append(f"{key}: unknown section")

    dist = None
    if "distribution" not in data:
        problems.append("distribution: missing required section")
    elif not isinstance(data["distribution"], dict):
        problems.append("distribution: expected an object")
    else:
        section = data["distribution"]
        for key in sorted(set(section) - {"mu_over_sigma"}):
            problems.append(f"distribution.{key}: unknown field")
        ratio = _take_number("distribution", section, "mu_over_sigma", problems)
        if ratio is not None:
            dist = FrequencyDistribution(mu=ratio, sigma=1.0)

    windows = {}
    for section in _WINDOW_SECTIONS:
        if section not in data:
            problems.append(f"{section}: missing required section")
            continue
        windows[section] = _build_window(
            section, data[section], problems, output=section == "output"
        )

    pol_data = dict(_DEFAULT_POLARIZATION)
    raw_pol = data.get("polarization", {})
    if not isinstance(raw_pol, dict):
        problems.append("polarization: expected an object")
        raw_pol = {}
    for key in sorted(set(raw_pol) - set(_DEFAULT_POLARIZATION)):
        problems.append(f"polarization.{key}: unknown field")
    for key in _DEFAULT_POLARIZATION:
        value = _take_number(
            "polarization", raw_pol, key, problems, default=pol_data[key]
        )
        if value is not None:
            pol_data[key] = value
    pol = None
    try:
        pol = PolarizationState(
            complex(pol_data["ch_re"], pol_data["ch_im"]),
            complex(pol_data["cv_re"], pol_data["cv_im"]),
            pol_data["theta"],
        )
    except ValueError as exc:
        problems.append(f"polarization: {exc}")

    run = data.get("run", {})
    if not isinstance(run, dict):
        problems.append("run: expected an object")
        run = {}

    cfg = None
    if dist and pol and all(windows.get(s) for s in _WINDOW_SECTIONS):
        try:
            cfg = InterferometerConfig(
                dist, windows["arm0"], windows["arm1"], windows["output"], pol
            )
        except ValueError as exc:
            problems.append(f"output.t_start: {exc}")
    if problems or cfg is None:
        raise ConfigError(problems or ["config could not be constructed"])
    return cfg, run


def load_config(path) -> tuple[InterferometerConfig, dict]:
    """Read and validate a JSON experiment description.

    ``preset:NAME`` resolves to one of the shipped presets.
    """
    if isinstance(path, str) and path.startswith("preset:"):
        path = preset_path(path.removeprefix("preset:"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError([f"{path}: {exc}"])
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON: {exc}"])
    return build_config(data)


def parse_grid(spec: str) -> np.ndarray:
    """Parse START:STOP:STEP into an inclusive, deterministic time grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError([f"grid: expected START:STOP:STEP, got {spec!r}"])
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError([f"grid: non-numeric component in {spec!r}"])
    if step <= 0 or stop < start:
        raise ConfigError([f"grid: need stop >= start and step > 0 in {spec!r}"])
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _fmt(value: float) -> str:
    return format(value, ".17g")


def _auto_reach(cfg: InterferometerConfig) -> float:
    """Laboratory-time horizon comfortably past any recoherence peak."""
    t0, t1 = cfg.window0.duration, cfg.window1.duration
    a1 = abs(cfg.window0.n_h * t0 - cfg.window1.n_v * t1)
    a2 = abs(cfg.window1.n_h * t1 - cfg.window0.n_v * t0)
    dn = abs(cfg.window_out.delta_n)
    spread = (max(a1, a2) + 10.0 / cfg.dist.sigma) / dn if dn else 100.0
    return min(cfg.window_out.t_start + spread, cfg.window_out.t_stop)


def cmd_sweep(cfg: InterferometerConfig, grid: np.ndarray, locations, out) -> int:
    """Write one CSV row per grid time with the requested trace distances,
    port probabilities and output-port H populations."""
    unknown = [loc for loc in locations if loc not in analysis.LOCATIONS]
    if unknown:
        raise ConfigError([f"locations: unknown {', '.join(unknown)}"])
    inside = {"path0", "path1", "joint_inside"}
    limit = cfg.window_out.t_start
    for loc in locations:
        if loc in inside and (grid[0] < 0 or grid[-1] > limit):
            raise ConfigError(
                [f"locations: {loc} is only defined for times in [0, {limit}]"]
            )

    columns: dict[str, list[str] | None] = {}
    for loc in locations:
        try:
            series = analysis.trace_distance_series(cfg, loc, grid)
            columns[loc] = [_fmt(v) for v in series.values]
        except ImpossibleOutcome:
            print(
                f"warning: {loc} is a dark port; emitting empty cells",
                file=sys.stderr,
            )
            columns[loc] = None

    p0, p1 = path_probabilities(cfg)
    pops = []
    for jp in (0, 1):
        try:
            pops.append(_fmt(conditional_state_outside(cfg, jp, grid[0]).population_h))
        except ImpossibleOutcome:
            pops.append("")

    header = ["tau"] + [f"D_{loc}" for loc in locations]
    header += ["p_out0", "p_out1", "popH_out0", "popH_out1"]
    lines = [",".join(header)]
    p0s, p1s = _fmt(p0), _fmt(p1)
    for k, t in enumerate(grid):
        row = [_fmt(t)]
        for loc in locations:
            col = columns[loc]
            row.append("" if col is None else col[k])
        row += [p0s, p1s, pops[0], pops[1]]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


def cmd_estimate(cfg: InterferometerConfig, scan: tuple[float, float] | None) -> int:
    """Report the recoherence peak and the path-difference estimate."""
    if scan is None:
        scan = (cfg.window_out.t_start, _auto_reach(cfg))
    estimate = analysis.estimate_interaction_time_difference(cfg)
    t_max, peak = analysis.lambda_peak(cfg, scan)
    t0, t1 = cfg.window0.duration, cfg.window1.duration
    index_mode = abs(t0 - t1) < 1e-12 and (
        cfg.window0.n_h != cfg.window1.n_h or cfg.window0.n_v != cfg.window1.n_v
    )
    print(f"peak_total_interaction_time: {_fmt(t_max)}")
    print(f"peak_value: {_fmt(peak)}")
    if index_mode:
        delta_idx = abs(cfg.window_out.delta_n) * t_max / t0
        truth = max(
            abs(cfg.window0.n_h - cfg.window1.n_h),
            abs(cfg.window0.n_v - cfg.window1.n_v),
        )
        print("estimated_quantity: index_difference")
        print(f"index_difference_estimate: {_fmt(delta_idx)}")
        print(f"ground_truth: {_fmt(truth)}")
        rel = abs(delta_idx - truth) / truth if truth else math.inf
    else:
        truth = abs(t0 - t1)
        print("estimated_quantity: interaction_time_difference")
        print(f"time_difference_estimate: {_fmt(estimate)}")
        print(f"ground_truth: {_fmt(truth)}")
        rel = abs(estimate - truth) / truth if truth else math.inf
    print(f"relative_error: {_fmt(rel) if math.isfinite(rel) else 'n/a'}")
    return 0


def cmd_divisibility(cfg: InterferometerConfig, grid: np.ndarray) -> int:
    """List non-CP-divisible intervals per output port next to the backflow
    intervals; any disagreement is an internal consistency failure."""
    step = float(np.max(np.diff(grid)))
    agree = True
    for jp, location in ((0, "path0_out"), (1, "path1_out")):
        if path_probabilities(cfg)[jp] < 1e-14:
            print(f"port {jp}: dark port, no conditional dynamics")
            continue
        scan = maps.divisibility_scan(cfg, jp, grid)
        series = analysis.trace_distance_series(cfg, location, grid)
        backflow = analysis.backflow_intervals(series)
        print(f"port {jp}: {len(scan)} non-CP-divisible interval(s)")
        for lo, hi in scan:
            print(f"  non_cp_divisible: [{_fmt(lo)}, {_fmt(hi)}]")
        for lo, hi in backflow:
            print(f"  backflow:         [{_fmt(lo)}, {_fmt(hi)}]")
        same = len(scan) == len(backflow) and all(
            abs(a[0] - b[0]) <= step + 1e-12 and abs(a[1] - b[1]) <= step + 1e-12
            for a, b in zip(scan, backflow)
        )
        agree = agree and same
    print(f"consistency: {'OK' if agree else 'DISAGREEMENT'}")
    return 0 if agree else 1


def cmd_oracle_check(cfg: InterferometerConfig, n: int, times) -> int:
    """Compare closed forms against the brute-force evolution."""
    grid = oracle.FrequencyGrid.build(cfg.dist, n=n)
    result = oracle.oracle_compare(cfg, grid, times)
    ok = (
        result.max_deviation <= ORACLE_CHECK_THRESHOLD
        and result.probability_deviation <= ORACLE_PROB_THRESHOLD
    )
    print(f"max_deviation: {_fmt(result.max_deviation)}")
    print(f"probability_deviation: {_fmt(result.probability_deviation)}")
    print(f"verdict: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _default_times(cfg: InterferometerConfig) -> list[float]:
    start = cfg.window_out.t_start
    inside = np.linspace(0.0, start, 10)
    outside = np.linspace(start, _auto_reach(cfg), 10)
    return [*inside, *outside]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzdephase",
        description="Dephasing and non-Markovianity analysis of a noisy "
        "Mach-Zehnder interferometer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to a JSON config")
    common.add_argument("--grid", help="time grid as START:STOP:STEP")

    p_sweep = sub.add_parser("sweep", parents=[common], help="trace-distance sweep to CSV")
    p_sweep.add_argument(
        "--locations",
        help="comma-separated subset of: " + ", ".join(analysis.LOCATIONS),
    )
    p_sweep.add_argument("--out", default="-", help="output CSV path ('-' = stdout)")

    sub.add_parser("estimate", parents=[common], help="path-difference estimation")
    sub.add_parser("divisibility", parents=[common], help="CP-divisibility report")

    p_oracle = sub.add_parser("oracle-check", parents=[common], help="brute-force check")
    p_oracle.add_argument("--n-freq", type=int, default=oracle.DEFAULT_N_FREQ,
                          help="frequency grid size")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, run = load_config(args.config)
        grid_spec = args.grid or run.get("grid")
        if args.command == "sweep":
            if not grid_spec:
                raise ConfigError(["grid: required for sweep (flag --grid or run.grid)"])
            if args.locations:
                locations = args.locations.split(",")
            else:
                locations = run.get("locations") or ["path0_out", "path1_out", "joint_out"]
            return cmd_sweep(cfg, parse_grid(grid_spec), locations, args.out)
        if args.command == "estimate":
            scan = None
            if grid_spec:
                grid = parse_grid(grid_spec)
                scan = (float(grid[0]), float(grid[-1]))
            return cmd_estimate(cfg, scan)
        if args.command == "divisibility":
            if not grid_spec:
                raise ConfigError(["grid: required for divisibility"])
            return cmd_divisibility(cfg, parse_grid(grid_spec))
        if args.command == "oracle-check":
            n = args.n_freq if args.n_freq else run.get("n_freq", oracle.DEFAULT_N_FREQ)
            times = list(parse_grid(grid_spec)) if grid_spec else _default_times(cfg)
            return cmd_oracle_check(cfg, n, times)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except (EstimatorOutOfRegime, PeakNotFound) as exc:
        print(f"out of regime: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
