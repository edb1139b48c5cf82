import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from sparselik import (
    ScoreParams,
    bj_score,
    component_f1,
    component_f2,
    hc_score,
    penalized_score,
    sl_score,
    sl_term,
)
from sparselik.score import P_FLOOR

from oracles import naive_penalty, naive_term

PARAMS_78 = ScoreParams(78, 1.0, 1.86)


class TestScoreParams:
    def test_weights(self):
        p = ScoreParams(500, 1.0, 1.84)
        assert p.f1_weight == pytest.approx(math.log(500) / 500)
        assert p.f2_weight == pytest.approx(1.84 / math.sqrt(500 * math.log(500)))

    def test_rejects_tiny_panels(self):
        with pytest.raises(ValueError):
            ScoreParams(2)

    def test_rejects_bad_lambdas(self):
        with pytest.raises(ValueError):
            ScoreParams(10, -0.1, 1.0)
        with pytest.raises(ValueError):
            ScoreParams(10, 1.0, 0.0)
        with pytest.raises(ValueError):
            ScoreParams(10, 1.0, math.inf)

    def test_rejects_weights_that_break_positivity(self):
        # at p = 1 the tilted density is 1 - a/4 - b; huge lambda2 drives it
        # negative and the log would be undefined somewhere on (0, 1]
        with pytest.raises(ValueError):
            ScoreParams(3, 0.0, 20.0)


class TestComponents:
    def test_f1_frozen_value(self):
        assert component_f1(0.081) == pytest.approx(0.10607364365594274, rel=1e-14)

    def test_f2_frozen_value(self):
        assert component_f2(0.081) == pytest.approx(1.5136418446315325, rel=1e-14)

    def test_f1_integrates_to_zero(self):
        # substitute p = exp(-x): integral of 1/(2+x)^2 - exp(-x)/2 over x >= 0
        val, err = quad(lambda x: 1.0 / (2.0 + x) ** 2 - 0.5 * math.exp(-x), 0, np.inf)
        assert abs(val) < 1e-9

    def test_f2_integrates_to_zero(self):
        val, err = quad(lambda x: math.exp(-x / 2.0) - 2.0 * math.exp(-x), 0, np.inf)
        assert abs(val) < 1e-9

    def test_rejects_out_of_range(self):
        for bad in (0.0, -0.5, 1.5, math.nan):
            with pytest.raises(ValueError):
                component_f1(bad)
            with pytest.raises(ValueError):
                component_f2(bad)


class TestSlTerm:
    def test_frozen_value(self):
        assert sl_term(0.081, PARAMS_78) == pytest.approx(
            0.14725514263631445, rel=1e-14
        )

    def test_tilted_density_integrates_to_one(self):
        # exp(term) is the tilted density; its integral over (0, 1] is what
        # makes the Markov bound work.  Truncating at p = exp(-600) and the
        # P_FLOOR clamp both shave a little mass, so the value sits just
        # below 1 (the clamp only ever shrinks the density).
        p = ScoreParams(50, 1.0, 1.5)
        val, err = quad(
            lambda x: math.exp(sl_term(math.exp(-x), p)) * math.exp(-x), 0, 600, limit=400
        )
        assert 0.998 < val <= 1.0 + 1e-9
        assert val == pytest.approx(1.0, abs=2e-3)

    @pytest.mark.parametrize("p", [1e-300, 1e-200, 1e-50, 1e-8, 1e-3, 0.5, 1.0])
    def test_matches_direct_formula(self, p):
        got = sl_term(p, PARAMS_78)
        assert got == pytest.approx(naive_term(p, 78, 1.0, 1.86), rel=1e-12)

    def test_branches_agree_at_switch(self):
        # the log-space branch starts below 1/(N log N); both forms are
        # algebraically equal so the function is continuous there
        cut = 1.0 / (78 * math.log(78))
        lo = sl_term(cut * (1 - 1e-9), PARAMS_78)
        hi = sl_term(cut * (1 + 1e-9), PARAMS_78)
        assert lo == pytest.approx(hi, rel=1e-6)

    def test_lambda1_zero_skips_f1(self):
        p = ScoreParams(78, 0.0, 1.86)
        assert sl_term(1e-12, p) == pytest.approx(naive_term(1e-12, 78, 0.0, 1.86), rel=1e-12)

    def test_floor_applies(self):
        assert sl_term(1e-310, PARAMS_78) == sl_term(P_FLOOR, PARAMS_78)

    def test_array_matches_scalar(self):
        ps = np.array([1e-20, 0.01, 0.5, 1.0])
        arr = sl_term(ps, PARAMS_78)
        assert arr.shape == (4,)
        for i, p in enumerate(ps):
            assert arr[i] == sl_term(float(p), PARAMS_78)

    @given(st.floats(min_value=1e-280, max_value=1.0))
    @settings(max_examples=200, deadline=None)
    def test_decreasing_in_p(self, p):
        other = min(1.0, p * 1.5)
        if other > p:
            assert sl_term(p, PARAMS_78) >= sl_term(other, PARAMS_78)

    def test_rejects_bad_pvalues(self):
        with pytest.raises(ValueError):
            sl_term(0.0, PARAMS_78)
        with pytest.raises(ValueError):
            sl_term(1.0000001, PARAMS_78)


class TestSlScore:
    def test_sum_of_terms(self):
        ps = np.array([0.01, 0.3, 1.0])
        prm = ScoreParams(3, 1.0, 1.0)
        assert sl_score(ps, prm) == pytest.approx(
            sum(sl_term(float(p), prm) for p in ps)
        )

    def test_requires_one_p_per_sequence(self):
        with pytest.raises(ValueError):
            sl_score([0.1, 0.2], ScoreParams(3))

    @given(st.lists(st.floats(min_value=1e-12, max_value=1.0), min_size=5, max_size=5))
    @settings(max_examples=100, deadline=None)
    def test_permutation_invariant(self, ps):
        prm = ScoreParams(5, 1.0, 1.2)
        shuffled = list(reversed(ps))
        assert sl_score(ps, prm) == pytest.approx(sl_score(shuffled, prm), rel=1e-12)


def slow_hc(ps):
    ps = sorted(ps)
    n_seq = len(ps)
    best = None
    for n, p in enumerate(ps, start=1):
        if n_seq * p <= n:
            val = 0.0 if p >= 1.0 else (n - n_seq * p) / math.sqrt(n_seq * p * (1 - p))
            best = val if best is None else max(best, val)
    return 0.0 if best is None else best


def slow_bj(ps):
    ps = sorted(ps)
    n_seq = len(ps)
    best = None
    for n, p in enumerate(ps, start=1):
        if n_seq * p <= n:
            val = n * math.log(n / (n_seq * p))
            if n < n_seq:
                pc = min(p, 1 - 1e-12)
                val += (n_seq - n) * math.log((n_seq - n) / (n_seq * (1 - pc)))
            best = val if best is None else max(best, val)
    return 0.0 if best is None else best


class TestHcBj:
    def test_hc_frozen_single(self):
        assert hc_score([0.01]) == pytest.approx(9.9498743710662, rel=1e-13)

    def test_bj_frozen_single(self):
        assert bj_score([0.01]) == pytest.approx(4.605170185988092, rel=1e-13)

    def test_hc_frozen_pair(self):
        # (2 - 2*0.95)/sqrt(2*0.95*0.05): the n = 2 index qualifies
        assert hc_score([0.9, 0.95]) == pytest.approx(0.32444284226152525, rel=1e-13)

    def test_bj_frozen_pair(self):
        assert bj_score([0.9, 0.95]) == pytest.approx(0.10258658877510096, rel=1e-13)

    def test_last_index_always_qualifies(self):
        # at n = N the constraint N*p_(N) <= N always holds, so the max is
        # over a nonempty set even for large p-values
        ps = [0.9, 0.99, 0.995]
        assert hc_score(ps) == pytest.approx(slow_hc(ps), rel=1e-12)
        assert bj_score(ps) == pytest.approx(slow_bj(ps), rel=1e-12)

    def test_all_ones(self):
        assert hc_score([1.0, 1.0]) == 0.0
        assert bj_score([1.0, 1.0]) == pytest.approx(0.0, abs=1e-9)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            hc_score([])
        with pytest.raises(ValueError):
            bj_score([])

    @given(
        st.lists(st.floats(min_value=1e-6, max_value=1.0), min_size=1, max_size=12)
    )
    @settings(max_examples=150, deadline=None)
    def test_match_slow_forms(self, ps):
        assert hc_score(ps) == pytest.approx(slow_hc(ps), rel=1e-9, abs=1e-9)
        assert bj_score(ps) == pytest.approx(slow_bj(ps), rel=1e-9, abs=1e-9)


class TestPenalizedScore:
    def test_matches_direct_formula(self):
        got = penalized_score(3.0, 10, 25, 50, 500)
        assert got == pytest.approx(3.0 - naive_penalty(10, 25, 50, 500), rel=1e-14)

    def test_zero_penalty_at_symmetric_full_split(self):
        assert penalized_score(0.0, 0, 250, 500, 500) == pytest.approx(0.0, abs=1e-12)

    @given(
        st.integers(min_value=0, max_value=400),
        st.integers(min_value=1, max_value=50),
        st.integers(min_value=1, max_value=50),
    )
    @settings(max_examples=200, deadline=None)
    def test_penalty_nonnegative_inside_panel(self, start, left, right):
        # whenever the window fits in the panel the penalty cannot be negative
        split = start + left
        end = split + right
        if end > 500:
            return
        assert penalized_score(0.0, start, split, end, 500) <= 1e-12

    def test_vectorized(self):
        raw = np.array([1.0, 2.0])
        got = penalized_score(raw, np.array([0, 5]), np.array([3, 9]), np.array([6, 12]), 100)
        assert got.shape == (2,)
        assert got[1] == pytest.approx(penalized_score(2.0, 5, 9, 12, 100))

    def test_rejects_bad_windows(self):
        with pytest.raises(ValueError):
            penalized_score(0.0, 5, 5, 10, 100)
        with pytest.raises(ValueError):
            penalized_score(0.0, -1, 5, 10, 100)
        with pytest.raises(ValueError):
            penalized_score(0.0, 0, 5, 10, 0)
