import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparselik import (
    BoundaryParams,
    boundary_constants,
    d_omega,
    g_omega,
    poisson_info,
    rho_poisson,
    rho_z,
    rho_z_segment,
)


class TestRhoZ:
    def test_linear_piece(self):
        assert rho_z(0.6) == pytest.approx(0.1, rel=1e-14)
        assert rho_z(0.75) == 0.25  # boundary belongs to the linear piece

    def test_square_root_piece(self):
        want = (1.0 - math.sqrt(1.0 - 0.9)) ** 2
        assert rho_z(0.9) == pytest.approx(want, rel=1e-14)

    def test_continuous_at_three_quarters(self):
        eps = 1e-12
        assert rho_z(0.75 - eps) == pytest.approx(rho_z(0.75 + eps), abs=1e-10)
        # exact equality of the two closed forms at the junction
        assert (1.0 - math.sqrt(0.25)) ** 2 == 0.25

    def test_domain(self):
        for bad in (0.5, 1.0, 0.2, 1.3):
            with pytest.raises(ValueError):
                rho_z(bad)

    @given(st.floats(min_value=0.501, max_value=0.999))
    @settings(max_examples=200, deadline=None)
    def test_increasing(self, beta):
        other = min(0.999, beta + 0.001)
        if other > beta:
            assert rho_z(other) >= rho_z(beta)


class TestRhoZSegment:
    @given(
        st.floats(min_value=0.05, max_value=0.9),
        st.floats(min_value=0.51, max_value=0.99),
    )
    @settings(max_examples=200, deadline=None)
    def test_rescales_rho_z(self, zeta, ratio):
        # beta = ratio * (1 - zeta) sweeps the whole domain
        beta = ratio * (1.0 - zeta)
        want = (1.0 - zeta) * rho_z(ratio)
        assert rho_z_segment(beta, zeta) == pytest.approx(want, rel=1e-12)

    def test_continuous_at_junction(self):
        zeta = 0.4
        junction = 0.75 * (1.0 - zeta)
        lo = rho_z_segment(junction - 1e-12, zeta)
        hi = rho_z_segment(junction + 1e-12, zeta)
        assert lo == pytest.approx(hi, abs=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            rho_z_segment(0.3, 0.0)
        with pytest.raises(ValueError):
            rho_z_segment(0.2, 0.5)  # below (1 - zeta)/2
        with pytest.raises(ValueError):
            rho_z_segment(0.5, 0.5)  # at 1 - zeta


class TestPoissonInfo:
    def test_frozen_value(self):
        assert poisson_info(2.0) == pytest.approx(0.16989903679539725, rel=1e-14)

    def test_zero_at_unit_ratio(self):
        assert poisson_info(1.0) == 0.0

    def test_direct_formula(self):
        r = 3.5
        want = r * math.log(2 * r / (r + 1)) + math.log(2 / (r + 1))
        assert poisson_info(r) == pytest.approx(want, rel=1e-14)

    @given(st.floats(min_value=1.0, max_value=50.0))
    @settings(max_examples=100, deadline=None)
    def test_increasing(self, r):
        assert poisson_info(r + 0.01) > poisson_info(r)

    def test_domain(self):
        with pytest.raises(ValueError):
            poisson_info(0.99)


class TestGAndD:
    def test_known_values(self):
        assert g_omega(2.0, 2.0) == pytest.approx(math.sqrt(2.5), rel=1e-14)
        assert g_omega(3.0, 1.0) == pytest.approx(2.0, rel=1e-14)

    def test_d_is_kl_style_mixture(self):
        r, w = 2.0, 2.0
        rw = r**w
        share = rw / (1 + rw)
        want = (1 - share) * math.log(2 / (1 + rw)) + share * math.log(2 * rw / (1 + rw))
        assert d_omega(r, w) == pytest.approx(want, rel=1e-14)
        assert d_omega(2.0, 2.0) == pytest.approx(0.19274475702175758, rel=1e-12)

    @given(
        st.floats(min_value=1.2, max_value=8.0),
        st.floats(min_value=0.3, max_value=2.0),
    )
    @settings(max_examples=150, deadline=None)
    def test_derivative_identity(self, r, w):
        # g satisfies g'(w) = D(w) g(w) / w^2; central difference check
        eps = 1e-6
        num = (g_omega(r, w + eps) - g_omega(r, w - eps)) / (2 * eps)
        want = d_omega(r, w) * g_omega(r, w) / (w * w)
        assert num == pytest.approx(want, rel=1e-4, abs=1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            g_omega(2.0, 0.0)
        with pytest.raises(ValueError):
            d_omega(2.0, -1.0)


# beta/(1 - zeta) at or below this puts the maximizer at omega = 2 for r = 2
THRESHOLD_R2 = 0.7662417527844531


class TestRhoPoisson:
    def test_frozen_interior_cases(self):
        value, omega = rho_poisson(0.55, 0.3, 2.0)
        assert value == pytest.approx(1.236014963825198, rel=1e-10)
        assert omega == pytest.approx(1.9156393996744958, abs=1e-6)
        value, omega = rho_poisson(0.63, 0.3, 2.0)
        assert value == pytest.approx(1.9605153764306331, rel=1e-10)
        assert omega == pytest.approx(1.4790201912234955, abs=1e-6)

    def test_boundary_regime_pins_omega_at_two(self):
        # beta/(1 - zeta) = 0.75 is below the r = 2 threshold
        value, omega = rho_poisson(0.525, 0.3, 2.0)
        assert 0.525 / 0.7 < THRESHOLD_R2
        assert omega == pytest.approx(2.0, abs=1e-6)
        g2 = g_omega(2.0, 2.0)
        assert value == pytest.approx((0.525 - 0.35) / (2 * g2 - 3), abs=1e-9)

    def test_interior_stationarity_identity(self):
        for beta in (0.55, 0.63):
            value, omega = rho_poisson(beta, 0.3, 2.0)
            g = g_omega(2.0, omega)
            d = d_omega(2.0, omega)
            assert beta / 0.7 == pytest.approx(1 / omega + (2 * g - 3) / (2 * g * d), abs=1e-6)
            assert value == pytest.approx(0.7 / (2 * g * d), abs=1e-6)

    def test_value_dominates_grid(self):
        import numpy as np

        beta, zeta, r = 0.58, 0.25, 3.0
        value, _ = rho_poisson(beta, zeta, r)
        lo = (1 - zeta) / beta
        grid = np.linspace(lo + 1e-9, 2.0, 20001)
        xi = (beta - (1 - zeta) / grid) / (2 * g_omega(r, grid) - 1 - r)
        assert value >= float(xi.max()) - 1e-9

    def test_domain(self):
        with pytest.raises(ValueError):
            rho_poisson(0.25, 0.5, 2.0)  # beta at (1 - zeta)/2
        with pytest.raises(ValueError):
            rho_poisson(0.75, 0.25, 2.0)  # beta at 1 - zeta
        with pytest.raises(ValueError):
            rho_poisson(0.6, 0.3, 1.0)  # ratio must exceed 1
        with pytest.raises(ValueError):
            rho_poisson(0.6, 1.0, 2.0)


class TestBoundaryConstants:
    def test_normal_only(self):
        out = boundary_constants(BoundaryParams(beta=0.6))
        assert set(out) == {"rho_z"}
        assert out["rho_z"] == pytest.approx(rho_z(0.6))

    def test_segment_without_plain(self):
        # beta below 1/2 rules out rho_z but not the segment version
        out = boundary_constants(BoundaryParams(beta=0.3, zeta=0.5))
        assert set(out) == {"rho_z_segment"}

    def test_poisson_gating(self):
        out = boundary_constants(BoundaryParams(beta=0.55, zeta=0.3, ratio=2.0))
        assert set(out) == {"rho_z", "rho_z_segment", "poisson_info", "rho_poisson", "omega_star"}
        value, omega = rho_poisson(0.55, 0.3, 2.0)
        assert out["rho_poisson"] == pytest.approx(value)
        assert out["omega_star"] == pytest.approx(omega)

    def test_ratio_without_zeta(self):
        out = boundary_constants(BoundaryParams(beta=0.6, ratio=4.0))
        assert set(out) == {"rho_z", "poisson_info"}

    def test_params_validation(self):
        with pytest.raises(ValueError):
            BoundaryParams(beta=0.0)
        with pytest.raises(ValueError):
            BoundaryParams(beta=0.5, zeta=1.0)
        with pytest.raises(ValueError):
            BoundaryParams(beta=0.5, ratio=1.0)
