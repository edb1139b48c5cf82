"""Null calibration of the detection threshold.

One simulation pass serves every candidate critical value: each null
replication records the largest penalized screening score over all scales
and windows, and ``sl_detect`` reports at least one change-point at level c
exactly when that maximum is >= c.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import isotonic_regression

from .models import DataPanel
from .segment import SLConfig, _Engine
from .windows import WindowSchedule, approx_set

__all__ = [
    "CalibrationCurve",
    "max_screen_score",
    "calibrate_null",
    "find_critical",
    "markov_envelope",
    "write_curve",
]


@dataclass(frozen=True)
class CalibrationCurve:
    """Estimated type-I error (any reported change-point) per critical value."""

    critical_values: np.ndarray
    type1_raw: np.ndarray
    type1_monotone: np.ndarray
    stderr: np.ndarray
    n_replications: int
    n_sequences: int
    length: int
    model: str


def max_screen_score(panel: DataPanel, cfg: SLConfig) -> float:
    """Largest penalized screening score over every scale and window.

    The panel is scored as given (no noise normalization).  Returns -inf when
    the panel is too short for any window.
    """
    engine = _Engine(panel, cfg, total_length=panel.length)
    g = panel.length
    best = -math.inf
    for scale in range(1, engine.schedule.max_scale(g) + 1):
        triples = approx_set(engine.schedule, scale, g)
        triples = triples[triples[:, 1] >= 2]
        if triples.shape[0] == 0:
            continue
        scores = engine.window_scores(triples[:, 0], triples[:, 1], triples[:, 2])
        best = max(best, float(np.max(scores)))
    return best


def _replication_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(rep, 1)).generate_state(1, np.uint64)[0])


def calibrate_null(
    n_sequences: int,
    length: int,
    cfg: SLConfig,
    grid,
    n_replications: int,
    seed: int,
    poisson_rate: float = 1.0,
) -> CalibrationCurve:
    """Monte Carlo type-I error curve on null panels.

    Null rows are i.i.d. standard normal, or i.i.d. Poisson(``poisson_rate``)
    under the Poisson model.  The raw curve is the exceedance fraction of the
    per-replication score maxima; the monotone column is its nonincreasing
    isotonic fit, and ``stderr`` the binomial standard error of the raw value.
    """
    grid = np.sort(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("empty critical-value grid")
    if n_replications < 1:
        raise ValueError("n_replications must be >= 1")
    maxima = np.empty(n_replications)
    for rep in range(n_replications):
        gen = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(rep,)))
        if cfg.model == "poisson":
            values = gen.poisson(poisson_rate, size=(n_sequences, length))
        else:
            values = gen.standard_normal((n_sequences, length))
        panel = DataPanel.from_values(values)
        rep_cfg = replace(cfg, seed=_replication_seed(seed, rep), normalize=False)
        maxima[rep] = max_screen_score(panel, rep_cfg)
    raw = np.mean(maxima[None, :] >= grid[:, None], axis=1)
    stderr = np.sqrt(raw * (1.0 - raw) / n_replications)
    monotone = isotonic_regression(raw, increasing=False).x
    return CalibrationCurve(
        critical_values=grid,
        type1_raw=raw,
        type1_monotone=np.asarray(monotone),
        stderr=stderr,
        n_replications=n_replications,
        n_sequences=n_sequences,
        length=length,
        model=cfg.model,
    )


def find_critical(curve: CalibrationCurve, alpha: float) -> float:
    """Smallest grid value whose monotone type-I estimate is <= alpha."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    ok = curve.type1_monotone <= alpha
    if not ok.any():
        raise ValueError(f"no grid value reaches type-I error {alpha}; extend the grid")
    return float(curve.critical_values[int(np.argmax(ok))])


def markov_envelope(schedule: WindowSchedule, critical) -> np.ndarray | float:
    """Union-bound ceiling sum_i (2 h_i / d_i) * exp(-c) on the type-I error."""
    total = sum(2.0 * h / d for h, d in zip(schedule.half_widths, schedule.spacings))
    out = total * np.exp(-np.asarray(critical, dtype=float))
    return float(out) if out.ndim == 0 else out


def write_curve(curve: CalibrationCurve, path) -> None:
    """Write a calibration curve as CSV with one row per critical value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["c", "type1_raw", "type1_monotone", "stderr"])
        for i in range(curve.critical_values.shape[0]):
            writer.writerow(
                [
                    repr(float(curve.critical_values[i])),
                    repr(float(curve.type1_raw[i])),
                    repr(float(curve.type1_monotone[i])),
                    repr(float(curve.stderr[i])),
                ]
            )
