import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sectorflow import (
    FamilyKind,
    OdeConfig,
    construct_exact,
    integrate_alpha1,
    integrate_general,
    mass_identity_defect,
    periodic_shooting,
    w_equation_residual,
)
from sectorflow.errors import SingularSwirl, ZeroSwirl


class TestAlpha1Integration:
    def test_tan_oracle(self):
        res = integrate_alpha1(1.0, 0.0, 0.0, (0.0, 0.5))
        assert res.completed
        assert res.profile.f_vals[-1] == pytest.approx(math.tan(0.5), abs=1e-8)

    def test_constant_branch(self):
        res = integrate_alpha1(1.0, -0.5, 0.0, (0.0, 1.0))
        np.testing.assert_allclose(res.profile.f_vals, 0.0, atol=1e-14)

    def test_blowup_pole_estimate(self):
        res = integrate_alpha1(1.0, 0.0, 0.0, (0.0, 2.0))
        assert res.blew_up
        assert not res.completed
        assert res.blowup_theta == pytest.approx(math.pi / 2, abs=1e-3)

    def test_zero_swirl_rejected(self):
        with pytest.raises(ZeroSwirl):
            integrate_alpha1(0.0, -0.5, 0.0, (0.0, 1.0))

    def test_landing_step_hits_endpoint(self):
        res = integrate_alpha1(1.0, 0.0, 0.0, (0.0, 0.3), OdeConfig(step=7e-3))
        assert res.profile.theta_nodes[-1] == pytest.approx(0.3, abs=1e-14)


class TestGeneralIntegration:
    def test_sec_oracle(self):
        res = integrate_general(2.0, 0.0, 1.0, 0.0, (0.0, 1.0))
        assert res.completed
        assert res.profile.v_vals[-1] == pytest.approx(1.0 / math.cos(1.0), abs=1e-7)

    def test_sin_family_oracle(self):
        C = math.pi / 3
        res = integrate_general(2.0, -0.5, math.sin(C), -math.cos(C), (0.0, 0.5))
        t = res.profile.theta_nodes
        np.testing.assert_allclose(res.profile.v_vals, np.sin(C - t), atol=1e-10)

    def test_singular_swirl_rejected(self):
        with pytest.raises(SingularSwirl):
            integrate_general(3.0, -0.5, 0.0, 1.0, (0.0, 1.0))

    def test_swirl_floor_flagged(self):
        # sin family swirl crosses zero at theta = C
        C = 0.4
        res = integrate_general(2.0, -0.5, math.sin(C), -math.cos(C), (0.0, 1.0))
        assert res.hit_swirl_floor
        assert res.floor_theta == pytest.approx(C, abs=1e-2)


class TestConvergenceOrder:
    def test_rk4_order(self):
        errs = []
        for step in (4e-3, 2e-3, 1e-3):
            res = integrate_alpha1(1.0, 0.0, 0.0, (0.0, 1.2), OdeConfig(step=step))
            errs.append(abs(res.profile.f_vals[-1] - math.tan(1.2)))
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 3.5


class TestShooting:
    def test_lambda_one_classification(self):
        report = periodic_shooting(1.0, -1.0, np.linspace(-2, 2, 41))
        assert report["lambda"] == pytest.approx(1.0)
        assert report["n_periodic"] == 2
        assert report["all_periodic_constant"]
        periodic_f0 = sorted(
            m["f0"] for m in report["members"] if m["is_periodic"]
        )
        assert periodic_f0 == [-1.0, 1.0]
        for m in report["members"]:
            if m["is_periodic"]:
                assert m["f_squared_defect"] < 1e-12
            else:
                assert m.get("defect", math.inf) > 1e-3 or "blowup_theta" in m

    def test_positive_const_never_periodic(self):
        report = periodic_shooting(1.0, 0.0, np.linspace(-2, 2, 9))
        assert report["n_periodic"] == 0
        for m in report["members"]:
            assert "blowup_theta" in m

    def test_zero_swirl_rejected(self):
        with pytest.raises(ZeroSwirl):
            periodic_shooting(0.0, -1.0, [0.0])


class TestDerivedChecks:
    def test_w_equation_residual_small(self):
        res = integrate_alpha1(1.0, -1.0, 0.5, (0.0, 2 * math.pi))
        assert w_equation_residual(res.profile, 1.0) < 1e-4

    def test_mass_identity_exact_family(self):
        sol = construct_exact(
            FamilyKind.SIN, {"alpha": 2.0, "p": -0.5, "C": math.pi / 2}, 1.0
        )
        assert mass_identity_defect(sol.profile(1.0, n=2000)) < 1e-6


@settings(max_examples=25, deadline=None)
@given(
    c=st.floats(0.5, 2.0),
    p=st.floats(-2.0, -0.3),
)
def test_constant_branch_property(c, p):
    """f0 = sqrt(-(c^2+2p)) stays constant whenever c^2 + 2p < 0."""
    if c * c + 2 * p >= -1e-3:
        return
    d = math.sqrt(-(c * c + 2 * p))
    res = integrate_alpha1(c, p, d, (0.0, 1.0), OdeConfig(step=5e-3))
    np.testing.assert_allclose(res.profile.f_vals, d, rtol=1e-9)


@settings(max_examples=20, deadline=None)
@given(alpha=st.floats(1.2, 3.0), c1=st.floats(0.5, 2.0))
def test_general_matches_cos_power(alpha, c1):
    sol = construct_exact(
        FamilyKind.COS_POWER, {"alpha": alpha, "C1": c1, "C2": 0.0}, 0.6
    )
    res = integrate_general(
        alpha, 0.0, float(sol.v(np.array([0.0]))[0]), 0.0, (0.0, 0.6),
        OdeConfig(step=2e-3),
    )
    t = res.profile.theta_nodes
    np.testing.assert_allclose(res.profile.v_vals, sol.v(t), atol=1e-7 * c1)
