"""Synthetic panels with known change structure, plus accuracy metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.metrics import adjusted_rand_score

from .models import DataPanel

__all__ = [
    "SingleChangeScenario",
    "MultiChangeScenario",
    "PoissonScenario",
    "gen_single_change",
    "gen_multi_change",
    "gen_poisson_change",
    "segment_labels",
    "ari",
    "hit_rate",
]


def _row_jumps(n_changed: int, amplitude: float) -> np.ndarray:
    # n-th altered row jumps by amplitude / sqrt(n * H) with H the harmonic sum,
    # so the total squared jump is amplitude^2 regardless of sparsity
    n = np.arange(1, n_changed + 1, dtype=float)
    harmonic = float(np.sum(1.0 / n))
    return amplitude / np.sqrt(n * harmonic)


@dataclass(frozen=True)
class SingleChangeScenario:
    """One mean shift at ``change_at`` in the first ``n_changed`` rows."""

    length: int = 500
    n_sequences: int = 500
    n_changed: int = 3
    change_at: int = 200
    amplitude: float = 0.8

    def __post_init__(self) -> None:
        if not 1 <= self.change_at < self.length:
            raise ValueError("change_at must lie in 1..length-1")
        if not 1 <= self.n_changed <= self.n_sequences:
            raise ValueError("n_changed must lie in 1..n_sequences")


@dataclass(frozen=True)
class MultiChangeScenario:
    """Several shifts; change j alters ``n_changed`` rows starting at row offset_step*(j-1).

    With ``offset_step = 0`` the same rows change every time; larger steps make
    the altered groups overlap partially or not at all.  Shifts accumulate.
    """

    length: int = 2000
    n_sequences: int = 200
    change_points: tuple[int, ...] = (500, 1000, 1500)
    n_changed: int = 40
    amplitude: float = 1.0
    offset_step: int = 0

    def __post_init__(self) -> None:
        pts = tuple(sorted(self.change_points))
        if len(set(pts)) != len(pts):
            raise ValueError("change points must be distinct")
        if pts and not (1 <= pts[0] and pts[-1] < self.length):
            raise ValueError("change points must lie in 1..length-1")
        last_first = self.offset_step * (len(pts) - 1) if pts else 0
        if last_first + self.n_changed > self.n_sequences:
            raise ValueError("altered rows run past the panel")


@dataclass(frozen=True)
class PoissonScenario:
    """Count panel; the first ``n_changed`` rows switch rate baseline -> ratio * baseline."""

    length: int = 200
    n_sequences: int = 20
    n_changed: int = 20
    baseline: float = 5.0
    ratio: float = 2.0
    change_at: int = 100

    def __post_init__(self) -> None:
        if self.baseline <= 0:
            raise ValueError("baseline rate must be > 0")
        if self.ratio <= 0:
            raise ValueError("ratio must be > 0")
        if not 1 <= self.change_at < self.length:
            raise ValueError("change_at must lie in 1..length-1")
        if not 1 <= self.n_changed <= self.n_sequences:
            raise ValueError("n_changed must lie in 1..n_sequences")


def gen_single_change(scenario: SingleChangeScenario, seed: int) -> DataPanel:
    """Unit-variance normal noise with one sparse mean shift."""
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((scenario.n_sequences, scenario.length))
    jumps = _row_jumps(scenario.n_changed, scenario.amplitude)
    values[: scenario.n_changed, scenario.change_at :] += jumps[:, None]
    return DataPanel.from_values(values)


def gen_multi_change(
    scenario: MultiChangeScenario, seed: int
) -> tuple[DataPanel, tuple[int, ...]]:
    """Unit-variance normal noise with accumulating sparse mean shifts."""
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((scenario.n_sequences, scenario.length))
    jumps = _row_jumps(scenario.n_changed, scenario.amplitude)
    points = tuple(sorted(scenario.change_points))
    for j, tau in enumerate(points):
        first = scenario.offset_step * j
        values[first : first + scenario.n_changed, tau:] += jumps[:, None]
    return DataPanel.from_values(values), points


def gen_poisson_change(scenario: PoissonScenario, seed: int) -> tuple[DataPanel, tuple[int, ...]]:
    """Poisson counts with a rate ratio change in the first ``n_changed`` rows."""
    rng = np.random.default_rng(seed)
    rates = np.full((scenario.n_sequences, scenario.length), scenario.baseline)
    rates[: scenario.n_changed, scenario.change_at :] *= scenario.ratio
    return DataPanel.from_values(rng.poisson(rates)), (scenario.change_at,)


def segment_labels(change_points, length: int) -> np.ndarray:
    """Segment index of each column under the partition induced by the change points."""
    pts = np.sort(np.asarray(list(change_points), dtype=np.int64))
    if pts.size and not (1 <= pts[0] and pts[-1] < length):
        raise ValueError("change points must lie in 1..length-1")
    return np.searchsorted(pts, np.arange(1, length + 1), side="left")


def ari(true_points, estimated_points, length: int) -> float:
    """Adjusted Rand index between the two induced partitions of the columns.

    1 exactly when the change-point sets coincide (both empty included);
    0 in expectation for unrelated partitions.
    """
    return float(
        adjusted_rand_score(
            segment_labels(true_points, length), segment_labels(estimated_points, length)
        )
    )


def hit_rate(estimates, truth: int, radius: int) -> float:
    """Fraction of estimates within ``radius`` of the true location."""
    est = np.atleast_1d(np.asarray(estimates, dtype=float))
    if est.size == 0:
        raise ValueError("no estimates given")
    return float(np.mean(np.abs(est - truth) <= radius))
