"""Sparsity-likelihood scores for combining p-values across sequences.

The per-sequence score is log(1 + a*f1(p) + b*f2(p)) where f1 and f2 both
integrate to zero over (0, 1], so exp(score) integrates to one against the
uniform density.  Summing over sequences therefore gives a statistic whose
null exceedance probability is bounded by exp(-c) via Markov's inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Smallest p-value fed to the score.  Phi(-|z|) underflows double precision
# near |z| ~ 38.6; everything smaller is treated as this floor.
P_FLOOR = 1e-300

__all__ = [
    "P_FLOOR",
    "ScoreParams",
    "component_f1",
    "component_f2",
    "sl_term",
    "sl_score",
    "hc_score",
    "bj_score",
    "penalized_score",
]


@dataclass(frozen=True)
class ScoreParams:
    """Weights of the two score components for a panel of ``n_sequences`` rows.

    ``lambda1`` multiplies the heavy-tail component f1 (weight log(N)/N) and
    ``lambda2`` the moderate-tail component f2 (weight 1/sqrt(N log N)).
    """

    n_sequences: int
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self) -> None:
        if self.n_sequences < 3:
            raise ValueError("n_sequences must be >= 3 so that log(n_sequences) > 1")
        if not (self.lambda1 >= 0.0 and math.isfinite(self.lambda1)):
            raise ValueError("lambda1 must be finite and >= 0")
        if not (self.lambda2 > 0.0 and math.isfinite(self.lambda2)):
            raise ValueError("lambda2 must be finite and > 0")
        # The tilted density 1 + a*f1(p) + b*f2(p) is decreasing in both
        # components, so positivity at p = 1 makes the score well defined.
        if 1.0 - self.f1_weight / 4.0 - self.f2_weight <= 0.0:
            raise ValueError("weights too large: tilted density not positive at p = 1")

    @property
    def f1_weight(self) -> float:
        n = self.n_sequences
        return self.lambda1 * math.log(n) / n

    @property
    def f2_weight(self) -> float:
        n = self.n_sequences
        return self.lambda2 / math.sqrt(n * math.log(n))


def _as_pvalues(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.size and (not np.all(np.isfinite(p)) or np.any(p <= 0.0) or np.any(p > 1.0)):
        raise ValueError("p-values must lie in (0, 1]")
    return p


def component_f1(p):
    """f1(p) = 1 / (p * (2 - log p)^2) - 1/2; integrates to zero on (0, 1]."""
    p = _as_pvalues(p)
    w = 2.0 - np.log(p)
    return 1.0 / (p * w * w) - 0.5


def component_f2(p):
    """f2(p) = 1/sqrt(p) - 2; integrates to zero on (0, 1]."""
    p = _as_pvalues(p)
    return 1.0 / np.sqrt(p) - 2.0


def sl_term(p, params: ScoreParams):
    """Per-sequence score log(1 + a*f1(p) + b*f2(p)).

    Accepts a scalar or an array of p-values in (0, 1].  Values below
    ``P_FLOOR`` are clamped.  For p below 1/(N log N) the f1 component
    dominates and the term is evaluated in log space; the two branches are
    algebraically identical, so they agree wherever both are finite.
    """
    p = _as_pvalues(p)
    scalar = p.ndim == 0
    p = np.maximum(np.atleast_1d(p), P_FLOOR)
    a = params.f1_weight
    b = params.f2_weight
    w = 2.0 - np.log(p)

    out = np.empty_like(p)
    if a > 0.0:
        small = p < 1.0 / (params.n_sequences * math.log(params.n_sequences))
    else:
        small = np.zeros(p.shape, dtype=bool)
    big = ~small

    pb, wb = p[big], w[big]
    x = a * (1.0 / (pb * wb * wb) - 0.5) + b * (1.0 / np.sqrt(pb) - 2.0)
    out[big] = np.log1p(x)

    if small.any():
        ps, ws = p[small], w[small]
        # 1 + a*f1 + b*f2 = (a / (p w^2)) * (1 + rest * p w^2 / a)
        rest = b / np.sqrt(ps) + (1.0 - 0.5 * a - 2.0 * b)
        out[small] = (
            math.log(a) - np.log(ps) - 2.0 * np.log(ws) + np.log1p(rest * ps * ws * ws / a)
        )
    return float(out[0]) if scalar else out


def sl_score(pvalues, params: ScoreParams) -> float:
    """Sum of ``sl_term`` over one p-value per sequence."""
    p = np.asarray(pvalues, dtype=float)
    if p.ndim != 1 or p.shape[0] != params.n_sequences:
        raise ValueError("expected one p-value per sequence")
    return float(np.sum(sl_term(p, params)))


def hc_score(pvalues) -> float:
    """Higher-criticism score of a p-value vector.

    max over sorted indices n with N*p_(n) <= n of
    (n - N*p_(n)) / sqrt(N * p_(n) * (1 - p_(n))); 0 when that set is empty.
    """
    p = np.sort(_as_pvalues(np.atleast_1d(pvalues)))
    n_seq = p.shape[0]
    if n_seq == 0:
        raise ValueError("empty p-value vector")
    n = np.arange(1, n_seq + 1, dtype=float)
    keep = n_seq * p <= n
    if not keep.any():
        return 0.0
    vals = np.zeros_like(p)
    ok = p < 1.0
    vals[ok] = (n[ok] - n_seq * p[ok]) / np.sqrt(n_seq * p[ok] * (1.0 - p[ok]))
    # p_(n) == 1 can satisfy the constraint only at n == N, where the term's
    # limit is 0; vals is already 0 there.
    return float(np.max(vals[keep]))


def bj_score(pvalues) -> float:
    """Berk-Jones score of a p-value vector.

    max over sorted indices n with N*p_(n) <= n of
    n*log(n / (N*p_(n))) + (N - n)*log((N - n) / (N*(1 - p_(n)))),
    reading the second summand as 0 at n == N; 0 when the set is empty.
    """
    p = np.sort(_as_pvalues(np.atleast_1d(pvalues)))
    n_seq = p.shape[0]
    if n_seq == 0:
        raise ValueError("empty p-value vector")
    n = np.arange(1, n_seq + 1, dtype=float)
    keep = n_seq * p <= n
    if not keep.any():
        return 0.0
    terms = n * np.log(n / (n_seq * p))
    inner = n < n_seq
    pc = np.minimum(p[inner], 1.0 - 1e-12)
    terms[inner] += (n_seq - n[inner]) * np.log((n_seq - n[inner]) / (n_seq * (1.0 - pc)))
    return float(np.max(terms[keep]))


def penalized_score(raw, start, split, end, total_length):
    """Subtract the window-size penalty log((T/4) * (1/(split-start) + 1/(end-split))).

    ``total_length`` is always the length of the original panel, also when the
    score was computed on a sub-segment.  The penalty is nonnegative whenever
    end - start <= total_length, vanishing only for the symmetric full split.
    """
    start = np.asarray(start)
    split = np.asarray(split)
    end = np.asarray(end)
    if np.any(start < 0) or np.any(split <= start) or np.any(end <= split):
        raise ValueError("need 0 <= start < split < end")
    if total_length < 1:
        raise ValueError("total_length must be >= 1")
    left = (split - start).astype(float)
    right = (end - split).astype(float)
    pen = np.log((total_length / 4.0) * (1.0 / left + 1.0 / right))
    result = np.asarray(raw, dtype=float) - pen
    return float(result) if result.ndim == 0 else result
