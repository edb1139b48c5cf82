"""Command-line interface: detect, calibrate, simulate, boundary.

Results are JSON documents with sorted keys (byte-stable for fixed inputs and
seed); calibration curves and replication tables are CSV.  Option precedence
is defaults < config file < flags given on the command line.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, replace

import numpy as np

from .calibrate import calibrate_null, find_critical, write_curve
from .models import DataPanel, DegenerateRowError
from .segment import SegmentationResult, SLConfig, sl_detect, single_changepoint
from .simulate import (
    MultiChangeScenario,
    PoissonScenario,
    SingleChangeScenario,
    ari,
    gen_multi_change,
    gen_poisson_change,
    gen_single_change,
)
from .theory import BoundaryParams, boundary_constants

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4

__all__ = ["main", "entry", "read_panel", "result_document", "InputError", "ConfigError"]


class InputError(Exception):
    """Malformed input data (unreadable, ragged, or wrong value type)."""


class ConfigError(Exception):
    """Inconsistent or unknown configuration."""


# ---------------------------------------------------------------- ingestion


def read_panel(path: str, row_ids: bool = False) -> tuple[np.ndarray, list[str] | None]:
    """Parse a comma- or tab-delimited panel, one sequence per row.

    With ``row_ids`` the first column holds labels.  Raises ``InputError``
    naming the offending row on ragged or non-numeric input.
    """
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"{path}: no data rows")
    delimiter = "\t" if "\t" in lines[0] else ","
    names: list[str] | None = [] if row_ids else None
    rows: list[list[float]] = []
    width = None
    for idx, record in enumerate(csv.reader(lines, delimiter=delimiter), start=1):
        cells = [c.strip() for c in record]
        if row_ids:
            if len(cells) < 2:
                raise InputError(f"{path}: row {idx}: expected an id and data columns")
            names.append(cells[0])
            cells = cells[1:]
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise InputError(f"{path}: row {idx}: expected {width} columns, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise InputError(f"{path}: row {idx}: non-numeric cell ({exc})") from exc
    return np.asarray(rows, dtype=float), names


# ----------------------------------------------------------- config merging


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path}: expected a JSON object")
    return data


_CONFIG_KEYS = {
    "model": str,
    "lambda1": float,
    "lambda2": float,
    "critical": float,
    "seed": int,
    "schedule": str,
    "growth": float,
    "h1": int,
    "normalize": bool,
    "threads": int,
}


def _merge_config(file_cfg: dict, flag_values: dict) -> SLConfig:
    """defaults < config file < explicitly given flags"""
    merged: dict = {}
    for key, value in file_cfg.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key: {key!r}")
        want = _CONFIG_KEYS[key]
        if want is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, want):
            raise ConfigError(f"config key {key!r}: expected {want.__name__}")
        merged[key] = value
    for key, value in flag_values.items():
        if value is not None:
            merged[key] = value
    try:
        return SLConfig(**merged)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _flag_config(args: argparse.Namespace) -> SLConfig:
    flags = {
        "model": args.model,
        "lambda1": args.lambda1,
        "lambda2": args.lambda2,
        "critical": args.critical,
        "seed": args.seed,
        "schedule": args.schedule,
        "growth": args.schedule_growth,
        "h1": args.schedule_h1,
        "normalize": False if args.no_normalize else None,
        "threads": args.threads,
    }
    return _merge_config(_load_config_file(args.config), flags)


# ------------------------------------------------------------ result output


def result_document(result: SegmentationResult, cfg: SLConfig, names: list[str] | None) -> dict:
    """JSON-ready description of a segmentation, including per-sequence evidence."""
    points = []
    for report in result.reports:
        cp = report.change_point
        sequences = []
        for row in range(result.n_sequences):
            entry = {
                "row": row,
                "p_value": float(report.p_values[row]),
                "score": float(report.terms[row]),
                "left_mean": float(report.left_means[row]),
                "right_mean": float(report.right_means[row]),
            }
            if names is not None:
                entry["row_id"] = names[row]
            if cfg.model == "poisson":
                win = report.window
                entry["left_sum"] = float(report.left_means[row] * (win.split - win.start))
                entry["right_sum"] = float(report.right_means[row] * (win.end - win.split))
            sequences.append(entry)
        points.append(
            {
                "location": cp.location,
                "scale_index": cp.scale_index,
                "score": cp.score,
                "sum_score": report.sum_score,
                "window": {
                    "start": report.window.start,
                    "split": report.window.split,
                    "end": report.window.end,
                },
                "sequences": sequences,
            }
        )
    parameters = {
        "model": cfg.model,
        "lambda1": cfg.lambda1,
        "lambda2": cfg.resolved_lambda2(result.length),
        "critical": result.critical,
        "seed": cfg.seed,
        "schedule": cfg.schedule,
        "growth": cfg.growth,
        "h1": cfg.h1,
        "normalize": cfg.normalize,
    }
    return {
        "format": "sparselik-detect/1",
        "n_sequences": result.n_sequences,
        "length": result.length,
        "parameters": parameters,
        "n_change_points": len(result.change_points),
        "change_points": points,
    }


def _dump(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ------------------------------------------------------------- subcommands


def _cmd_detect(args: argparse.Namespace) -> int:
    cfg = _flag_config(args)
    values, names = read_panel(args.input, row_ids=args.row_ids)
    panel = DataPanel.from_values(values)
    if cfg.model == "poisson" and not panel.integer_counts:
        raise InputError("Poisson model requires nonnegative integer counts")
    result = sl_detect(panel, cfg.critical, cfg)
    _dump(result_document(result, cfg, names), args.output)
    return EXIT_OK


def _parse_grid(text: str) -> np.ndarray:
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            return np.arange(start, stop + step / 2, step)
        return np.asarray([float(x) for x in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}; use start:stop:step or c1,c2,...") from exc


def _cmd_calibrate(args: argparse.Namespace) -> int:
    cfg = _flag_config(args)
    if args.n_sequences < 3 or args.length < 2:
        raise ConfigError("need n_sequences >= 3 and length >= 2")
    curve = calibrate_null(
        n_sequences=args.n_sequences,
        length=args.length,
        cfg=cfg,
        grid=_parse_grid(args.grid),
        n_replications=args.replications,
        seed=cfg.seed,
        poisson_rate=args.poisson_rate,
    )
    if args.output is not None:
        write_curve(curve, args.output)
    doc = {
        "format": "sparselik-calibrate/1",
        "model": curve.model,
        "n_sequences": curve.n_sequences,
        "length": curve.length,
        "n_replications": curve.n_replications,
        "grid": [float(c) for c in curve.critical_values],
        "type1_raw": [float(x) for x in curve.type1_raw],
        "type1_monotone": [float(x) for x in curve.type1_monotone],
        "stderr": [float(x) for x in curve.stderr],
    }
    if args.alpha is not None:
        try:
            doc["critical_at_alpha"] = find_critical(curve, args.alpha)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        doc["alpha"] = args.alpha
    _dump(doc, None if args.output is None else args.output + ".json")
    return EXIT_OK


def _scenario_from_file(path: str) -> tuple[str, dict]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"scenario file {path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError(f"scenario file {path}: expected an object with a 'kind' key")
    return str(data.pop("kind")), data


_SCENARIO_TYPES = {
    "single": SingleChangeScenario,
    "multi": MultiChangeScenario,
    "poisson": PoissonScenario,
}


def _cmd_simulate(args: argparse.Namespace) -> int:
    kind, raw = _scenario_from_file(args.scenario)
    if kind not in _SCENARIO_TYPES:
        raise ConfigError(f"unknown scenario kind {kind!r}")
    replications = int(raw.pop("replications", 100))
    seed = int(raw.pop("seed", 0))
    hit_radii = [int(r) for r in raw.pop("hit_radii", [3, 10])]
    detect_cfg = raw.pop("config", {})
    if not isinstance(detect_cfg, dict):
        raise ConfigError("scenario 'config' must be an object")
    if kind == "poisson":
        detect_cfg.setdefault("model", "poisson")
    if kind == "multi" and "change_points" in raw:
        raw["change_points"] = tuple(int(t) for t in raw["change_points"])
    try:
        scenario = _SCENARIO_TYPES[kind](**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad scenario parameters: {exc}") from exc
    cfg = _merge_config(detect_cfg, {})
    rows, summary = _run_replications(kind, scenario, cfg, replications, seed, hit_radii)
    if args.output is not None:
        with open(args.output, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(rows[0])
            writer.writerows(rows[1:])
    _dump(summary, None if args.output is None else args.output + ".json")
    return EXIT_OK


def _rep_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(rep,)).generate_state(1, np.uint64)[0])


def _run_replications(kind, scenario, cfg: SLConfig, replications, seed, hit_radii):
    summary: dict = {
        "format": "sparselik-simulate/1",
        "kind": kind,
        "replications": replications,
        "seed": seed,
        "scenario": asdict(scenario),
    }
    if kind == "single":
        header = ["rep", "estimate", "abs_error"] + [f"hit_{r}" for r in hit_radii]
        rows: list[list] = [header]
        estimates = []
        for rep in range(replications):
            panel = gen_single_change(scenario, _rep_seed(seed, rep))
            est = single_changepoint(panel, replace(cfg, seed=_rep_seed(seed, rep)))
            estimates.append(est)
            err = abs(est - scenario.change_at)
            rows.append([rep, est, err] + [int(err <= r) for r in hit_radii])
        summary["hit_rates"] = {
            str(r): float(np.mean([abs(e - scenario.change_at) <= r for e in estimates]))
            for r in hit_radii
        }
        return rows, summary
    if kind == "multi":
        header = ["rep", "n_change_points", "ari", "locations"]
        rows = [header]
        counts: dict[int, int] = {}
        aris = []
        for rep in range(replications):
            panel, truth = gen_multi_change(scenario, _rep_seed(seed, rep))
            result = sl_detect(panel, cfg.critical, replace(cfg, seed=_rep_seed(seed, rep)))
            value = ari(truth, result.locations, scenario.length)
            aris.append(value)
            counts[len(result.locations)] = counts.get(len(result.locations), 0) + 1
            rows.append([rep, len(result.locations), value, ";".join(map(str, result.locations))])
        summary["mean_ari"] = float(np.mean(aris))
        summary["count_distribution"] = {str(k): counts[k] for k in sorted(counts)}
        return rows, summary
    header = ["rep", "n_change_points", "detected", "locations"]
    rows = [header]
    detected = []
    for rep in range(replications):
        panel, _truth = gen_poisson_change(scenario, _rep_seed(seed, rep))
        result = sl_detect(panel, cfg.critical, replace(cfg, seed=_rep_seed(seed, rep)))
        detected.append(len(result.locations) > 0)
        rows.append(
            [rep, len(result.locations), int(detected[-1]), ";".join(map(str, result.locations))]
        )
    summary["detection_rate"] = float(np.mean(detected))
    return rows, summary


def _cmd_boundary(args: argparse.Namespace) -> int:
    try:
        params = BoundaryParams(
            beta=args.beta,
            zeta=args.zeta,
            ratio=args.ratio,
            delta=args.delta,
            eta=args.eta,
            epsilon=args.epsilon,
            nu=args.nu,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    doc = {
        "format": "sparselik-boundary/1",
        "parameters": asdict(params),
        "constants": boundary_constants(params),
    }
    _dump(doc, args.output)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--model", choices=["normal", "poisson"], default=None)
    sub.add_argument("--lambda1", type=float, default=None)
    sub.add_argument("--lambda2", type=float, default=None)
    sub.add_argument("--critical", type=float, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--schedule", choices=["geometric", "asymptotic"], default=None)
    sub.add_argument("--schedule-growth", type=float, default=None)
    sub.add_argument("--schedule-h1", type=int, default=None)
    sub.add_argument("--no-normalize", action="store_true")
    sub.add_argument("--threads", type=int, default=None)
    sub.add_argument("--config", default=None, help="JSON file; flags override its values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparselik", description="Multi-sequence change-point detection"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    detect = commands.add_parser("detect", help="segment a panel from a delimited file")
    detect.add_argument("input", help="CSV/TSV panel, one sequence per row")
    detect.add_argument("--row-ids", action="store_true", help="first column holds row labels")
    detect.add_argument("--output", default=None, help="write the JSON result here")
    _add_config_flags(detect)
    detect.set_defaults(func=_cmd_detect)

    calibrate = commands.add_parser("calibrate", help="estimate null type-I error curves")
    calibrate.add_argument("--n-sequences", type=int, required=True)
    calibrate.add_argument("--length", type=int, required=True)
    calibrate.add_argument("--grid", default="3:10:0.5", help="start:stop:step or c1,c2,...")
    calibrate.add_argument("--replications", type=int, default=200)
    calibrate.add_argument("--alpha", type=float, default=None, help="report the critical value at this level")
    calibrate.add_argument("--poisson-rate", type=float, default=1.0)
    calibrate.add_argument("--output", default=None, help="write the curve CSV here")
    _add_config_flags(calibrate)
    calibrate.set_defaults(func=_cmd_calibrate)

    simulate = commands.add_parser("simulate", help="run a scenario file")
    simulate.add_argument("scenario", help="JSON scenario description")
    simulate.add_argument("--output", default=None, help="write per-replication CSV here")
    simulate.set_defaults(func=_cmd_simulate)

    boundary = commands.add_parser("boundary", help="print detection-boundary constants")
    boundary.add_argument("--beta", type=float, required=True)
    boundary.add_argument("--zeta", type=float, default=None)
    boundary.add_argument("--ratio", type=float, default=None)
    boundary.add_argument("--delta", type=float, default=0.0)
    boundary.add_argument("--eta", type=float, default=0.0)
    boundary.add_argument("--epsilon", type=float, default=0.0)
    boundary.add_argument("--nu", type=float, default=0.0)
    boundary.add_argument("--output", default=None)
    boundary.set_defaults(func=_cmd_boundary)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateRowError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # keep the exit-code contract for unexpected failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
