"""Two-stage change-point search: multiscale screening plus local refinement.

The screen sweeps every scale over a segment and keeps the single window
with the highest penalized score; if that score clears the critical value,
the window is refined by scoring every admissible split inside it.
Detection recurses on the two child segments from the finest scale.
"""

from __future__ import annotations

from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field, replace

import numpy as np

from .models import (
    DataPanel,
    SegmentTriple,
    TripleRng,
    mad_normalize,
    normal_pvalue_matrix,
    poisson_pvalue_matrix,
)
from .score import ScoreParams, penalized_score, sl_term
from .windows import WindowSchedule, approx_set, asymptotic_schedule, default_lambda2, default_schedule

__all__ = [
    "SLConfig",
    "ChangePoint",
    "ChangePointReport",
    "SegmentationResult",
    "sl_estimate",
    "sl_detect",
    "single_changepoint",
]

MODELS = ("normal", "poisson")
SCHEDULES = ("geometric", "asymptotic")


@dataclass(frozen=True)
class SLConfig:
    """Run parameters shared by detection, calibration and the CLI.

    ``lambda2 = None`` resolves to ``default_lambda2(length)`` at run time.
    ``normalize`` applies MAD noise normalization once to the full panel
    (normal model only).  ``threads`` only parallelizes independent segments;
    results are identical for any thread count.
    """

    model: str = "normal"
    lambda1: float = 1.0
    lambda2: float | None = None
    critical: float = 5.0
    seed: int = 0
    schedule: str = "geometric"
    growth: float = 1.1
    h1: int = 1
    normalize: bool = True
    threads: int = 1

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        if self.lambda1 < 0:
            raise ValueError("lambda1 must be >= 0")
        if self.lambda2 is not None and not self.lambda2 > 0:
            raise ValueError("lambda2 must be > 0")
        if not self.growth > 1.0:
            raise ValueError("growth must be > 1")
        if self.h1 < 1:
            raise ValueError("h1 must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if int(self.seed) < 0:
            raise ValueError("seed must be >= 0")

    def resolved_lambda2(self, length: int) -> float:
        return default_lambda2(length) if self.lambda2 is None else self.lambda2

    def score_params(self, n_sequences: int, length: int) -> ScoreParams:
        return ScoreParams(n_sequences, self.lambda1, self.resolved_lambda2(length))

    def build_schedule(self, length: int) -> WindowSchedule:
        if self.schedule == "asymptotic":
            return asymptotic_schedule(length)
        return default_schedule(length, growth=self.growth, h1=self.h1)


@dataclass(frozen=True)
class ChangePoint:
    """A detected boundary: the mean changes between columns location and location + 1."""

    location: int
    scale_index: int
    score: float


@dataclass(frozen=True)
class ChangePointReport:
    """Per-sequence evidence at the refined window of one detection."""

    change_point: ChangePoint
    window: SegmentTriple
    p_values: np.ndarray
    terms: np.ndarray
    left_means: np.ndarray
    right_means: np.ndarray

    @property
    def sum_score(self) -> float:
        """Total score at the window before the size penalty."""
        return float(np.sum(self.terms))


@dataclass(frozen=True)
class SegmentationResult:
    change_points: tuple[ChangePoint, ...]
    reports: tuple[ChangePointReport, ...]
    n_sequences: int
    length: int
    critical: float

    @property
    def locations(self) -> tuple[int, ...]:
        return tuple(cp.location for cp in self.change_points)


@dataclass(frozen=True)
class _Candidate:
    point: ChangePoint
    window_start: int
    window_end: int


class _Engine:
    """Shared state for scoring windows of one panel."""

    def __init__(self, panel: DataPanel, cfg: SLConfig, total_length: int) -> None:
        if cfg.model == "poisson" and not panel.integer_counts:
            raise ValueError("Poisson model requires nonnegative integer counts")
        self.panel = panel
        self.cfg = cfg
        self.total_length = total_length
        self.params = cfg.score_params(panel.n_sequences, total_length)
        self.schedule = cfg.build_schedule(total_length)
        self.rng = TripleRng(cfg.seed)

    def pvalue_matrix(self, starts, splits, ends) -> np.ndarray:
        if self.cfg.model == "poisson":
            return poisson_pvalue_matrix(self.panel, starts, splits, ends, self.rng)
        return normal_pvalue_matrix(self.panel, starts, splits, ends)

    def window_scores(self, starts, splits, ends) -> np.ndarray:
        """Penalized scores of windows given in panel boundary coordinates."""
        p = self.pvalue_matrix(starts, splits, ends)
        raw = np.sum(sl_term(p, self.params), axis=0)
        return penalized_score(raw, starts, splits, ends, self.total_length)

    def estimate(self, critical: float, first_scale: int, begin: int, end: int) -> _Candidate | None:
        """Screen-and-refine on columns begin..end (1-based, inclusive).

        Screens every scale from first_scale up and keeps the best window
        over all of them; refines only when its score clears the critical
        value.  Ties keep the finest scale and the leftmost window.
        Candidate locations are strictly interior to the segment, which keeps
        both children strictly shorter and the recursion finite; windows whose
        split sits on the left edge are therefore not screened.
        """
        g = end - begin + 1
        offset = begin - 1
        top = self.schedule.max_scale(g)
        best: tuple[float, int, int, int] | None = None  # score, scale, s, u
        for scale in range(first_scale, top + 1):
            triples = approx_set(self.schedule, scale, g)
            triples = triples[triples[:, 1] >= 2]
            if triples.shape[0] == 0:
                continue
            scores = self.window_scores(
                offset + triples[:, 0], offset + triples[:, 1], offset + triples[:, 2]
            )
            k = int(np.argmax(scores))
            if best is None or scores[k] > best[0]:
                best = (float(scores[k]), scale, int(triples[k, 0]), int(triples[k, 2]))
        if best is None or best[0] < critical:
            return None
        _, scale, s0, u0 = best
        cand = np.arange(max(s0 + 1, 2), u0, dtype=np.int64)
        ref = self.window_scores(
            offset + np.full(cand.shape, s0, dtype=np.int64),
            offset + cand,
            offset + np.full(cand.shape, u0, dtype=np.int64),
        )
        pick = int(np.argmax(ref))
        point = ChangePoint(
            location=offset + int(cand[pick]),
            scale_index=scale,
            score=float(ref[pick]),
        )
        return _Candidate(point, offset + s0, offset + u0)

    def report(self, cand: _Candidate) -> ChangePointReport:
        s = np.array([cand.window_start], dtype=np.int64)
        t = np.array([cand.point.location], dtype=np.int64)
        u = np.array([cand.window_end], dtype=np.int64)
        p = self.pvalue_matrix(s, t, u)[:, 0]
        terms = sl_term(p, self.params)
        pre = self.panel.prefix
        left = (pre[:, t[0]] - pre[:, s[0]]) / float(t[0] - s[0])
        right = (pre[:, u[0]] - pre[:, t[0]]) / float(u[0] - t[0])
        return ChangePointReport(
            change_point=cand.point,
            window=SegmentTriple(int(s[0]), int(t[0]), int(u[0])),
            p_values=p,
            terms=terms,
            left_means=left,
            right_means=right,
        )


def _prepare(panel: DataPanel, cfg: SLConfig) -> DataPanel:
    if cfg.model == "normal" and cfg.normalize:
        return mad_normalize(panel)
    return panel


def sl_estimate(
    panel: DataPanel, critical: float, first_scale: int, begin: int, end: int, cfg: SLConfig
) -> ChangePoint | None:
    """One screen-and-refine pass over columns begin..end of the panel.

    The panel is scored as given (apply ``mad_normalize`` beforehand if
    wanted); the window-size penalty always uses the full panel length.
    Returns None when no screened window reaches ``critical`` or the segment
    is too short; ``first_scale`` skips scales finer than that index.
    """
    if not 1 <= begin <= end <= panel.length:
        raise ValueError("need 1 <= begin <= end <= panel length")
    if first_scale < 1:
        raise ValueError("first_scale must be >= 1")
    engine = _Engine(panel, cfg, total_length=panel.length)
    cand = engine.estimate(critical, first_scale, begin, end)
    return None if cand is None else cand.point


def _search(engine: _Engine, critical: float, length: int, threads: int) -> list[_Candidate]:
    found: list[_Candidate] = []
    if threads == 1:
        stack: list[tuple[int, int]] = [(1, length)]
        while stack:
            begin, end = stack.pop()
            cand = engine.estimate(critical, 1, begin, end)
            if cand is None:
                continue
            found.append(cand)
            loc = cand.point.location
            stack.append((begin, loc))
            stack.append((loc, end))
        return found
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = {pool.submit(engine.estimate, critical, 1, 1, length): (1, length)}
        while pending:
            done, _ = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                begin, end = pending.pop(fut)
                cand = fut.result()
                if cand is None:
                    continue
                found.append(cand)
                loc = cand.point.location
                pending[pool.submit(engine.estimate, critical, 1, begin, loc)] = (begin, loc)
                pending[pool.submit(engine.estimate, critical, 1, loc, end)] = (loc, end)
    return found


def sl_detect(panel: DataPanel, critical: float, cfg: SLConfig) -> SegmentationResult:
    """Recursive segmentation of a panel.

    Every detection splits the segment at the estimated location and both
    halves are searched again over all of their scales.  The reported set is
    sorted and strictly interior to its segments, and is a deterministic
    function of the panel, the configuration and the seed, regardless of
    ``cfg.threads``.
    """
    work = _prepare(panel, cfg)
    engine = _Engine(work, cfg, total_length=work.length)
    found = _search(engine, critical, work.length, cfg.threads)
    found.sort(key=lambda cand: cand.point.location)
    deduped: list[_Candidate] = []
    for cand in found:
        if not deduped or deduped[-1].point.location != cand.point.location:
            deduped.append(cand)
    return SegmentationResult(
        change_points=tuple(c.point for c in deduped),
        reports=tuple(engine.report(c) for c in deduped),
        n_sequences=work.n_sequences,
        length=work.length,
        critical=critical,
    )


def single_changepoint(panel: DataPanel, cfg: SLConfig) -> int:
    """Best split of the whole panel when it is assumed to hold one change.

    Maximizes the penalized score of (0, t, T) over every split t; ties go to
    the smallest t.
    """
    if panel.length < 3:
        raise ValueError("need at least three columns")
    work = _prepare(panel, cfg)
    engine = _Engine(work, cfg, total_length=work.length)
    length = work.length
    splits = np.arange(1, length, dtype=np.int64)
    scores = engine.window_scores(
        np.zeros(splits.shape, dtype=np.int64),
        splits,
        np.full(splits.shape, length, dtype=np.int64),
    )
    return int(splits[int(np.argmax(scores))])
