import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphene_pullin.bifurcation import (
    STATIC_PULL_IN_K,
    NoAmplitudeError,
    Periodic,
    PullIn,
    Rest,
    RestStateError,
    amplitude_x_max,
    classify,
    critical_point_s1,
    kappa,
    pull_in_voltage,
    static_pull_in_reference,
    threshold_comparison,
)
from graphene_pullin.model import (
    DeviceParams,
    ModelDomainError,
    OscParams,
    h_cubic,
    h_cubic_prime,
    h_cubic_second,
    nondimensionalize,
)
from oracles import kappa_oracle

# frozen from kappa_oracle (bisection on K for min h = 0; grid + golden section)
KAPPA_GOLDEN = {
    0.1: 0.12086923154682294,
    1.0: 0.08802549128843262,
    10.0: 0.0173721620556182,
}


class TestKappa:
    def test_linear_limit(self):
        assert kappa(0.0) == 0.125

    @pytest.mark.parametrize("alpha", [1e-12, 1e-8, 1e-6, 1e-5, 9.9e-5, 1e-4, 1.1e-4])
    def test_continuous_at_zero(self, alpha):
        # kappa'(0) = -1/24 from the expansion of h(s1)
        assert abs(kappa(alpha) - 0.125) <= alpha / 24 * 1.01 + 1e-16

    @pytest.mark.parametrize("alpha,expected", sorted(KAPPA_GOLDEN.items()))
    def test_golden(self, alpha, expected):
        assert kappa(alpha) == pytest.approx(expected, abs=1e-12)

    def test_spec_rounded_values(self):
        assert round(kappa(0.1), 7) == 0.1208692
        assert round(kappa(1.0), 7) == 0.0880255

    def test_small_alpha_branch_matches_closed_form(self):
        # both forms should give the same number where they overlap
        from graphene_pullin import bifurcation

        a = 2e-4
        s = bifurcation._s1_stable(a)
        stable = -0.5 * h_cubic(s, OscParams(a, 0.0))
        assert kappa(a) == pytest.approx(stable, rel=1e-12)

    @pytest.mark.parametrize("alpha", np.logspace(-3, 1, 25))
    def test_against_oracle(self, alpha):
        assert abs(kappa(alpha) - kappa_oracle(alpha)) < 1e-9

    def test_negative_alpha(self):
        with pytest.raises(ModelDomainError):
            kappa(-0.1)

    def test_strictly_decreasing(self):
        alphas = np.linspace(0.0, 10.0, 10_000)
        k = np.array([kappa(a) for a in alphas])
        assert np.all(np.diff(k) < 0)


class TestCriticalPoint:
    def test_alpha_one(self):
        assert critical_point_s1(1.0) == pytest.approx(0.3923748, abs=5e-8)

    def test_closed_form_of_the_text(self):
        a = 1.0
        b = 2 * a / 3 + 1
        assert critical_point_s1(a) == pytest.approx((b - math.sqrt(b * b - 2 * a)) / (2 * a), rel=1e-14)

    def test_small_alpha_limit(self):
        assert abs(critical_point_s1(1e-8) - 0.5) < 1e-6

    @given(st.floats(min_value=1e-6, max_value=100.0))
    def test_stationary_minimum(self, a):
        q = OscParams(a, 0.0)
        s1 = critical_point_s1(a)
        assert 0 < s1 < 1
        assert abs(h_cubic_prime(s1, q)) < 1e-12
        assert h_cubic_second(s1, q) > 0

    @pytest.mark.parametrize("alpha", [0.0, -1.0])
    def test_domain(self, alpha):
        with pytest.raises(ModelDomainError):
            critical_point_s1(alpha)


class TestAmplitude:
    def test_linear_closed_form(self):
        assert amplitude_x_max(OscParams(0.0, 0.1)) == pytest.approx(0.5 - 0.5 * math.sqrt(1 - 0.8), abs=1e-15)
        assert round(amplitude_x_max(OscParams(0.0, 0.1)), 7) == 0.2763932

    def test_linear_threshold(self):
        assert amplitude_x_max(OscParams(0.0, 0.125)) == 0.5

    def test_threshold_is_critical_point(self):
        assert amplitude_x_max(OscParams(1.0, kappa(1.0))) == critical_point_s1(1.0)

    def test_pull_in_has_no_amplitude(self):
        with pytest.raises(NoAmplitudeError):
            amplitude_x_max(OscParams(0.0, 0.126))

    def test_rest(self):
        with pytest.raises(RestStateError):
            amplitude_x_max(OscParams(0.3, 0.0))

    @given(st.floats(min_value=0.0, max_value=10.0), st.floats(min_value=1e-6, max_value=1 - 1e-9))
    @settings(max_examples=200)
    def test_is_root(self, a, frac):
        q = OscParams(a, frac * kappa(a))
        r = amplitude_x_max(q)
        assert abs(h_cubic(r, q)) < 1e-11
        # smallest root: h stays positive before it
        s = np.linspace(0, r, 200, endpoint=False)
        assert all(h_cubic(x, q) > 0 for x in s)

    @pytest.mark.parametrize("alpha", [1e-3, 0.1, 1.0, 3.0, 10.0])
    def test_threshold_bracketing(self, alpha):
        k = kappa(alpha)
        grid = np.linspace(0.0, 1.0, 10_002)[1:-1]
        below = OscParams(alpha, k - 1e-6)
        above = OscParams(alpha, k + 1e-6)
        amplitude_x_max(below)
        assert min(h_cubic(s, below) for s in grid) <= 0
        assert min(h_cubic(s, above) for s in grid) > 0


class TestClassify:
    def test_linear_below(self):
        r = classify(OscParams(0.0, 0.124))
        assert isinstance(r, Periodic)
        assert r.margin == pytest.approx(0.001)

    def test_linear_above(self):
        assert isinstance(classify(OscParams(0.0, 0.126)), PullIn)

    def test_nonlinear_lowers_threshold(self):
        assert isinstance(classify(OscParams(0.1, 0.124)), PullIn)

    def test_rest(self):
        assert isinstance(classify(OscParams(2.0, 0.0)), Rest)

    def test_boundary_is_periodic(self):
        r = classify(OscParams(1.0, kappa(1.0)))
        assert isinstance(r, Periodic)
        assert r.margin == 0.0

    def test_negative_inputs(self):
        with pytest.raises(ModelDomainError):
            classify(OscParams(0.0, -1.0))

    @given(st.floats(min_value=0.0, max_value=10.0), st.floats(min_value=1e-3, max_value=1e3))
    def test_voltage_scaling_flips_at_threshold(self, a, c):
        # K = c**2 * K0 with K0 = kappa: flips exactly when c crosses 1
        k = kappa(a)
        r = classify(OscParams(a, c * c * k))
        if c * c * k > k:
            assert isinstance(r, PullIn)
        else:
            assert isinstance(r, Periodic)


def _devices():
    return [
        DeviceParams(E=1.0e12, sigma_max=130e9, A_c=1e-15, A=1e-10, L=1e-6, d=1e-7, m=1e-15,
                     eps0=8.854e-12, V_dc=3.0),
        DeviceParams(E=1.0e12, D=0.0, A_c=2e-15, A=4e-10, L=2e-6, d=2e-7, m=3e-15,
                     eps0=8.854e-12, V_dc=1.0),
        DeviceParams(E=2.5, D=7.0, A_c=0.3, A=1.7, L=4.0, d=0.9, m=1.0, eps0=0.2, V_dc=0.0),
    ]


class TestPullInVoltage:
    @pytest.mark.parametrize("p", _devices())
    def test_round_trip(self, p):
        V = pull_in_voltage(p)
        q = nondimensionalize(p.with_voltage(V))
        assert q.K == pytest.approx(kappa(q.alpha), rel=1e-12)

    def test_linear_device(self):
        p = _devices()[1]
        expected = math.sqrt(p.E * p.A_c * p.d**3 / (4 * p.eps0 * p.A * p.L))
        assert pull_in_voltage(p) == pytest.approx(expected, rel=1e-14)

    def test_coscaled_gap_and_length(self):
        p = _devices()[0]
        # doubling d and L together keeps alpha fixed
        q = DeviceParams(E=p.E, D=p.D, A_c=p.A_c, A=p.A, L=2 * p.L, d=2 * p.d, m=p.m, eps0=p.eps0, V_dc=p.V_dc)
        assert nondimensionalize(q).alpha == pytest.approx(nondimensionalize(p).alpha, rel=1e-15)
        # V ~ sqrt(d**3 / L) at fixed alpha
        assert pull_in_voltage(q) / pull_in_voltage(p) == pytest.approx(2.0, rel=1e-14)

    def test_gap_scaling_at_fixed_length(self):
        p = _devices()[0]
        # halving D while doubling d keeps alpha fixed at the same L: V ~ d**1.5
        q = DeviceParams(E=p.E, D=p.D / 2, A_c=p.A_c, A=p.A, L=p.L, d=2 * p.d, m=p.m, eps0=p.eps0, V_dc=p.V_dc)
        assert pull_in_voltage(q) / pull_in_voltage(p) == pytest.approx(2.0**1.5, rel=1e-14)


class TestStaticReference:
    def test_value(self):
        assert static_pull_in_reference() == pytest.approx(0.148148148148148, abs=1e-15)

    @pytest.mark.parametrize("alpha", [0.0, 1.0])
    def test_dynamic_below_static(self, alpha):
        assert kappa(alpha) < STATIC_PULL_IN_K
        assert threshold_comparison(alpha)["dynamic_below_static"] is True
