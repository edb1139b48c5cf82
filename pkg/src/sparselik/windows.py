"""Multiscale schedules of screening windows.

A schedule is a ladder of half-widths h_1 < h_2 < ... with spacings d_i.
Scale i places split points at multiples of d_i and looks h_i to each side,
so the scanned triples at scale i for a segment of length g are
(max(0, k*d_i - h_i), k*d_i, min(k*d_i + h_i, g)) for k = 1..floor((g-1)/d_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WindowSchedule",
    "default_schedule",
    "asymptotic_schedule",
    "approx_set",
    "default_lambda2",
]


@dataclass(frozen=True)
class WindowSchedule:
    half_widths: tuple[int, ...]
    spacings: tuple[int, ...]

    def __post_init__(self) -> None:
        h, d = self.half_widths, self.spacings
        if len(h) != len(d):
            raise ValueError("half_widths and spacings must have equal length")
        for i in range(len(h)):
            if d[i] < 1 or d[i] > h[i]:
                raise ValueError("need 1 <= spacing <= half-width at every scale")
            if i > 0 and h[i] <= h[i - 1]:
                raise ValueError("half-widths must be strictly increasing")

    @property
    def n_scales(self) -> int:
        return len(self.half_widths)

    def max_scale(self, segment_length: int) -> int:
        """Largest 1-based scale i with h_i + d_i <= segment_length; 0 if none."""
        best = 0
        for i, (h, d) in enumerate(zip(self.half_widths, self.spacings), start=1):
            if h + d <= segment_length:
                best = i
        return best

    def n_triples(self, scale: int, segment_length: int) -> int:
        self._check_scale(scale)
        return max(0, (segment_length - 1) // self.spacings[scale - 1])

    def _check_scale(self, scale: int) -> None:
        if not 1 <= scale <= self.n_scales:
            raise ValueError(f"scale index {scale} out of range 1..{self.n_scales}")


def approx_set(schedule: WindowSchedule, scale: int, segment_length: int) -> np.ndarray:
    """Screening triples (s, t, u) at one scale, as an integer array of shape (K, 3).

    Split points t = k*d_i for k = 1..floor((g-1)/d_i); windows are clipped to
    the segment.  Empty (K = 0) when the segment is too short.
    """
    schedule._check_scale(scale)
    h = schedule.half_widths[scale - 1]
    d = schedule.spacings[scale - 1]
    n_k = max(0, (segment_length - 1) // d)
    t = np.arange(1, n_k + 1, dtype=np.int64) * d
    s = np.maximum(0, t - h)
    u = np.minimum(t + h, segment_length)
    return np.column_stack([s, t, u])


def _ceil_stable(x: float) -> int:
    # guards against products like 1.1 * 30 landing one ulp above an integer
    return int(math.ceil(round(x, 9)))


def default_schedule(length: int, growth: float = 1.1, h1: int = 1) -> WindowSchedule:
    """Geometric ladder h_{i+1} = ceil(growth * h_i) with spacings max(1, h_i // i).

    Scales are kept while h_i + d_i <= length, so very short panels give an
    empty schedule.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if not growth > 1.0:
        raise ValueError("growth must be > 1")
    if h1 < 1:
        raise ValueError("h1 must be >= 1")
    half_widths: list[int] = []
    spacings: list[int] = []
    h, i = h1, 1
    while True:
        d = max(1, h // i)
        if h + d > length:
            break
        half_widths.append(h)
        spacings.append(d)
        h = _ceil_stable(growth * h)
        i += 1
    return WindowSchedule(tuple(half_widths), tuple(spacings))


def asymptotic_schedule(length: int) -> WindowSchedule:
    """Alternative ladder with h_i ~ exp(i / log i), for experiments.

    The target is not monotone for the first few indices, so each half-width
    is forced to exceed its predecessor.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    half_widths: list[int] = []
    spacings: list[int] = []
    h, i = 1, 1
    while True:
        d = max(1, h // i)
        if h + d > length:
            break
        half_widths.append(h)
        spacings.append(d)
        i += 1
        h = max(h + 1, _ceil_stable(math.exp(i / math.log(i))))
    return WindowSchedule(tuple(half_widths), tuple(spacings))


def default_lambda2(length: int) -> float:
    """sqrt(log T / max(log log T, 0.1)); the moderate-tail weight for length T."""
    if length < 2:
        raise ValueError("length must be >= 2")
    return math.sqrt(math.log(length) / max(math.log(math.log(length)), 0.1))
