"""Data panels and per-window p-values for the normal and Poisson models."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtr
from scipy.stats import binom

from .score import P_FLOOR

# sqrt(2) * Phi^{-1}(3/4): median absolute difference of adjacent unit-variance
# normal observations.
MAD_TO_SIGMA = math.sqrt(2.0) * 0.6744897501960817

__all__ = [
    "DataPanel",
    "SegmentTriple",
    "TripleRng",
    "DegenerateRowError",
    "segment_mean",
    "normal_pvalue",
    "normal_pvalue_matrix",
    "conditional_binomial_pvalue",
    "binomial_twosided_pvalue",
    "poisson_pvalue",
    "poisson_pvalue_matrix",
    "mad_normalize",
]


class DegenerateRowError(ValueError):
    """A row whose adjacent differences have zero median absolute value."""


@dataclass(frozen=True)
class SegmentTriple:
    """Window boundaries 0 <= start < split < end, in panel boundary coordinates.

    Boundary i sits between columns i and i+1 (1-based), so the window compares
    columns (start, split] against (split, end].
    """

    start: int
    split: int
    end: int

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.split < self.end:
            raise ValueError("need 0 <= start < split < end")


@dataclass(frozen=True)
class DataPanel:
    """N x T panel with row prefix sums.

    ``prefix[n, j]`` is the sum of the first j entries of row n, so segment
    sums are prefix differences.  ``integer_counts`` records whether every
    entry is a nonnegative integer (required by the Poisson model).
    """

    values: np.ndarray
    prefix: np.ndarray
    integer_counts: bool

    @classmethod
    def from_values(cls, values) -> "DataPanel":
        v = np.asarray(values, dtype=float)
        if v.ndim != 2:
            raise ValueError("panel must be 2-dimensional (sequences x time)")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("panel must have at least one row and one column")
        if not np.all(np.isfinite(v)):
            raise ValueError("panel entries must be finite")
        prefix = np.zeros((v.shape[0], v.shape[1] + 1), dtype=float)
        np.cumsum(v, axis=1, out=prefix[:, 1:])
        counts = bool(np.all(v >= 0.0) and np.all(v == np.rint(v)))
        return cls(values=v, prefix=prefix, integer_counts=counts)

    @property
    def n_sequences(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


class TripleRng:
    """Deterministic uniforms for randomized p-values, keyed by window position.

    Every (start, split, end) window gets its own counter-based stream, so a
    window's draw does not depend on evaluation order or thread count.
    """

    def __init__(self, seed: int) -> None:
        seed = int(seed)
        if seed < 0:
            raise ValueError("seed must be >= 0")
        self._seed = seed

    @property
    def seed(self) -> int:
        return self._seed

    def uniforms(self, start: int, split: int, end: int, n_rows: int) -> np.ndarray:
        bits = Philox(key=self._seed, counter=[start, split, end, 0])
        return Generator(bits).random(n_rows)

    def uniform(self, row: int, start: int, split: int, end: int) -> float:
        return float(self.uniforms(start, split, end, row + 1)[row])


def segment_mean(panel: DataPanel, row: int, start: int, end: int) -> float:
    """Mean of row ``row`` over columns (start, end]."""
    if not 0 <= start < end <= panel.length:
        raise ValueError("need 0 <= start < end <= panel length")
    return float((panel.prefix[row, end] - panel.prefix[row, start]) / (end - start))


def normal_pvalue(panel: DataPanel, row: int, triple: SegmentTriple) -> tuple[float, float]:
    """Two-sided normal p-value comparing the window halves of one row.

    Returns (z, p) with z the standardized difference of the half means and
    p = 2 * Phi(-|z|), floored at ``P_FLOOR``.
    """
    s, t, u = triple.start, triple.split, triple.end
    if u > panel.length:
        raise ValueError("window extends past the panel")
    left = segment_mean(panel, row, s, t)
    right = segment_mean(panel, row, t, u)
    z = (right - left) / math.sqrt(1.0 / (u - t) + 1.0 / (t - s))
    p = 2.0 * float(ndtr(-abs(z)))
    return z, max(p, P_FLOOR)


def normal_pvalue_matrix(panel: DataPanel, starts, splits, ends) -> np.ndarray:
    """Normal p-values for every (row, window) pair; one column per window."""
    starts = np.asarray(starts, dtype=np.int64)
    splits = np.asarray(splits, dtype=np.int64)
    ends = np.asarray(ends, dtype=np.int64)
    pre = panel.prefix
    left_len = (splits - starts).astype(float)
    right_len = (ends - splits).astype(float)
    left = (pre[:, splits] - pre[:, starts]) / left_len
    right = (pre[:, ends] - pre[:, splits]) / right_len
    z = (right - left) / np.sqrt(1.0 / left_len + 1.0 / right_len)
    p = 2.0 * ndtr(-np.abs(z))
    return np.maximum(p, P_FLOOR, out=p)


def conditional_binomial_pvalue(k, y, pi, u):
    """Randomized two-sided binomial p-value; exactly Uniform(0, 1) under the null.

    v = P(Bin(y, pi) <= k-1) + u * P(Bin(y, pi) = k) and p = 2 * min(v, 1 - v),
    clamped into (0, 1].  ``u`` is the randomization uniform.
    """
    v = binom.cdf(np.asarray(k) - 1, y, pi) + np.asarray(u) * binom.pmf(k, y, pi)
    p = 2.0 * np.minimum(v, 1.0 - v)
    p = np.clip(p, P_FLOOR, 1.0)
    return float(p) if np.ndim(p) == 0 else p


def binomial_twosided_pvalue(k, y, pi):
    """Non-randomized two-sided binomial p-value 2 * min(P(X <= k), P(X >= k)), capped at 1."""
    lo = binom.cdf(k, y, pi)
    hi = binom.sf(np.asarray(k) - 1, y, pi)
    p = np.clip(2.0 * np.minimum(lo, hi), P_FLOOR, 1.0)
    return float(p) if np.ndim(p) == 0 else p


def poisson_pvalue(panel: DataPanel, row: int, triple: SegmentTriple, rng: TripleRng) -> float:
    """Randomized conditional p-value for one row of a count panel.

    Given the window total y, the left-half count is Binomial(y, pi) under a
    constant rate, with pi the left share of the window length.  The
    randomized tail is exactly uniform under the null, for any rate.
    """
    if not panel.integer_counts:
        raise ValueError("Poisson p-values require nonnegative integer counts")
    s, t, u = triple.start, triple.split, triple.end
    if u > panel.length:
        raise ValueError("window extends past the panel")
    y = panel.prefix[row, u] - panel.prefix[row, s]
    k = panel.prefix[row, t] - panel.prefix[row, s]
    pi = (t - s) / (u - s)
    draw = rng.uniform(row, s, t, u)
    return float(conditional_binomial_pvalue(k, y, pi, draw))


def poisson_pvalue_matrix(panel: DataPanel, starts, splits, ends, rng: TripleRng) -> np.ndarray:
    """Randomized conditional p-values for every (row, window) pair."""
    if not panel.integer_counts:
        raise ValueError("Poisson p-values require nonnegative integer counts")
    starts = np.asarray(starts, dtype=np.int64)
    splits = np.asarray(splits, dtype=np.int64)
    ends = np.asarray(ends, dtype=np.int64)
    pre = panel.prefix
    y = pre[:, ends] - pre[:, starts]
    k = pre[:, splits] - pre[:, starts]
    pi = (splits - starts) / (ends - starts)
    draws = np.empty_like(y)
    for j in range(starts.shape[0]):
        draws[:, j] = rng.uniforms(int(starts[j]), int(splits[j]), int(ends[j]), panel.n_sequences)
    return conditional_binomial_pvalue(k, y, pi, draws)


def mad_normalize(panel: DataPanel) -> DataPanel:
    """Scale each row by its noise level estimated from adjacent differences.

    sigma_n = median(|X[t+1] - X[t]|) / (sqrt(2) * Phi^{-1}(3/4)).  Applied
    once to the full panel, never per sub-segment.  Raises
    ``DegenerateRowError`` when a row's differences have zero median.
    """
    if panel.length < 2:
        raise ValueError("need at least two columns to estimate noise levels")
    med = np.median(np.abs(np.diff(panel.values, axis=1)), axis=1)
    if np.any(med <= 0.0):
        row = int(np.flatnonzero(med <= 0.0)[0])
        raise DegenerateRowError(
            f"row {row}: median absolute difference is zero, cannot normalize"
        )
    sigma = med / MAD_TO_SIGMA
    return DataPanel.from_values(panel.values / sigma[:, None])
