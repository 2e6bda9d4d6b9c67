import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from graphene_pullin.model import (
    DeviceParams,
    ModelDomainError,
    OscParams,
    State,
    dimensional_forces,
    dimensional_rhs,
    energy,
    f_envelope,
    h_cubic,
    nondimensionalize,
    rhs,
)
from graphene_pullin.simulator import SimConfig, simulate

alphas = st.floats(min_value=0.0, max_value=10.0)
Ks = st.floats(min_value=0.0, max_value=2.0)


def unit_device(**overrides):
    base = dict(E=1.0, A_c=1.0, A=1.0, L=1.0, d=1.0, m=1.0, eps0=2.0, V_dc=1.0, D=0.3)
    base.update(overrides)
    return DeviceParams(**base)


def graphene_device(V_dc=10.0):
    # roughly a 1 um strip, 100 nm gap, 10 um plate
    return DeviceParams(
        E=1.0e12, sigma_max=130e9, A_c=1e-15, A=1e-10, L=1e-6, d=1e-7,
        m=1e-15, eps0=8.854e-12, V_dc=V_dc,
    )


class TestDeviceParams:
    def test_sigma_max_derives_D(self):
        p = graphene_device()
        assert p.D == pytest.approx(1e24 / (4 * 130e9), rel=1e-15)

    def test_D_derives_sigma_max(self):
        p = unit_device(D=0.25)
        assert p.sigma_max == pytest.approx(1.0)

    def test_linear_spring_has_infinite_yield(self):
        assert unit_device(D=0.0).sigma_max == math.inf

    def test_consistent_pair_accepted(self):
        DeviceParams(E=2.0, A_c=1, A=1, L=1, d=1, m=1, eps0=1, V_dc=1, D=1.0, sigma_max=1.0)

    def test_inconsistent_pair_rejected(self):
        with pytest.raises(ModelDomainError):
            DeviceParams(E=2.0, A_c=1, A=1, L=1, d=1, m=1, eps0=1, V_dc=1, D=1.0 + 1e-9, sigma_max=1.0)

    @pytest.mark.parametrize("field", ["E", "A_c", "A", "L", "d", "m", "eps0"])
    def test_non_positive_rejected(self, field):
        with pytest.raises(ModelDomainError):
            unit_device(**{field: 0.0})

    def test_needs_D_or_sigma_max(self):
        with pytest.raises(ModelDomainError):
            DeviceParams(E=1, A_c=1, A=1, L=1, d=1, m=1, eps0=1, V_dc=1)


class TestNondimensionalize:
    def test_zero_voltage(self):
        assert nondimensionalize(unit_device(V_dc=0.0)).K == 0.0

    def test_linear_spring(self):
        assert nondimensionalize(unit_device(D=0.0)).alpha == 0.0

    def test_unit_device(self):
        q = nondimensionalize(unit_device(D=0.3))
        assert q.K == 1.0
        assert q.alpha == 0.3

    def test_scales(self):
        p = graphene_device()
        assert p.time_scale == pytest.approx(1e9)
        assert p.length_scale == 1e-7

    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_doubling_voltage_quadruples_K(self, V):
        p = graphene_device(V)
        q1, q2 = nondimensionalize(p), nondimensionalize(p.with_voltage(2 * V))
        assert q2.K == pytest.approx(4 * q1.K, rel=1e-14)
        assert q2.alpha == q1.alpha


class TestForces:
    def test_zero_displacement(self):
        p = graphene_device()
        F_res, F_C = dimensional_forces(p, 0.0)
        assert F_res == 0.0
        assert F_C == pytest.approx(p.eps0 * p.A * p.V_dc**2 / (2 * p.d**2), rel=1e-15)

    def test_zero_voltage(self):
        p = graphene_device(V_dc=0.0)
        for x in np.linspace(-p.d, 0.99 * p.d, 11):
            assert dimensional_forces(p, x)[1] == 0.0

    def test_strain_at_stress_maximum(self):
        p = graphene_device()
        x = p.L * p.E / (2 * p.D)
        # beyond the gap for this device; use a wide-gap copy
        wide = DeviceParams(E=p.E, D=p.D, A_c=p.A_c, A=p.A, L=p.L, d=10 * x, m=p.m, eps0=p.eps0, V_dc=0.0)
        F_res, _ = dimensional_forces(wide, x)
        assert F_res == pytest.approx(-p.E**2 * p.A_c / (4 * p.D), rel=1e-12)

    def test_restoring_force_odd(self):
        p = graphene_device()
        assert dimensional_forces(p, -3e-8)[0] == pytest.approx(-dimensional_forces(p, 3e-8)[0])

    def test_contact_is_domain_error(self):
        p = graphene_device()
        with pytest.raises(ModelDomainError):
            dimensional_forces(p, p.d)


class TestRhsEnergy:
    def test_unforced_origin_is_equilibrium(self):
        assert rhs(State(0.0, 0.0), OscParams(0.7, 0.0)) == (0.0, 0.0)

    @given(alphas, Ks)
    def test_origin_acceleration_is_K(self, a, K):
        assert rhs(State(0.0, 0.0), OscParams(a, K)) == (0.0, K)

    def test_hand_value(self):
        v, acc = rhs(State(0.5, 0.0), OscParams(1.0, 0.25))
        assert (v, acc) == (0.0, pytest.approx(0.75, abs=1e-15))

    def test_singularity(self):
        with pytest.raises(ModelDomainError):
            rhs(State(1.0, 0.0), OscParams(0.0, 0.1))
        with pytest.raises(ModelDomainError):
            energy(State(1.5, 0.0), OscParams(0.0, 0.1))

    @given(alphas, st.floats(min_value=-0.99, max_value=0.99), st.floats(min_value=-5, max_value=5))
    def test_restoring_term_odd(self, a, x, v):
        q = OscParams(a, 0.0)
        assert rhs(State(-x, v), q)[1] == -rhs(State(x, v), q)[1]

    @given(alphas, Ks)
    def test_energy_at_rest(self, a, K):
        assert energy(State(0.0, 0.0), OscParams(a, K)) == -K

    @given(st.floats(min_value=0.0, max_value=2 * math.pi), st.floats(min_value=0.01, max_value=0.9))
    def test_harmonic_energy(self, th, r):
        q = OscParams(0.0, 0.0)
        assert energy(State(r * math.cos(th), r * math.sin(th)), q) == pytest.approx(0.5 * r * r, rel=1e-14)

    @given(alphas, Ks, st.floats(min_value=-0.9, max_value=0.9), st.floats(min_value=-3, max_value=3))
    @settings(max_examples=200)
    def test_energy_constant_along_vector_field(self, a, K, x, v):
        # central difference of energy along the flow direction
        q = OscParams(a, K)
        dx, dv = rhs(State(x, v), q)
        eps = 1e-6
        e_plus = energy(State(x + eps * dx, v + eps * dv), q)
        e_minus = energy(State(x - eps * dx, v - eps * dv), q)
        scale = 1.0 + abs(dx) ** 2 + abs(dv) ** 2
        assert abs(e_plus - e_minus) / (2 * eps) < 1e-7 * scale

    def test_energy_drift_along_trajectory(self):
        q = OscParams(0.1, 0.1)
        tr = simulate(SimConfig(q=q, t_end=50.0))
        e = np.array([energy(State(x, v), q) for x, v in zip(tr.x, tr.v)])
        assert np.max(np.abs(e - e[0])) < 1e-8


class TestEnvelope:
    def test_zero(self):
        assert f_envelope(0.0, OscParams(0.4, 0.2)) == 0.0

    def test_linear_hand_value(self):
        assert f_envelope(0.5, OscParams(0.0, 1.0)) == pytest.approx(1.75, rel=1e-15)

    def test_domain(self):
        with pytest.raises(ModelDomainError):
            f_envelope(1.0, OscParams(0.0, 0.1))

    @given(alphas, Ks, st.floats(min_value=1e-6, max_value=1 - 1e-6))
    @settings(max_examples=300)
    def test_factored_identity(self, a, K, s):
        q = OscParams(a, K)
        lhs = f_envelope(s, q) * (1 - s)
        rhs_ = s * h_cubic(s, q)
        # relative to the size of the terms being combined
        scale = s * (2 / 3 * a * s * s + (2 / 3 * a + 1) * s + 1 + 2 * K) + 2 * K
        assert abs(lhs - rhs_) <= 1e-13 * scale

    def test_envelope_vanishes_at_amplitude(self):
        from graphene_pullin.bifurcation import amplitude_x_max

        q = OscParams(0.1, 0.1)
        assert abs(f_envelope(amplitude_x_max(q), q)) < 1e-14


class TestCubic:
    @given(alphas, Ks)
    def test_endpoints(self, a, K):
        q = OscParams(a, K)
        assert h_cubic(0.0, q) == 2 * K
        assert h_cubic(1.0, q) == pytest.approx(2 * K, abs=1e-14)

    def test_linear_threshold_double_root(self):
        assert h_cubic(0.5, OscParams(0.0, 0.125)) == 0.0


def test_dimensional_matches_dimensionless():
    p = graphene_device(V_dc=10.0)
    q = nondimensionalize(p)
    omega, d = p.time_scale, p.length_scale
    t_end = 20.0
    tr = simulate(SimConfig(q=q, t_end=t_end))

    sol = solve_ivp(
        lambda t, y: dimensional_rhs(p, y[0], y[1]),
        (0.0, t_end / omega),
        [0.0, 0.0],
        method="DOP853",
        rtol=1e-13,
        atol=[1e-15 * d, 1e-15 * d * omega],
        dense_output=True,
        first_step=1e-3 / omega,
    )
    assert sol.success
    x_phys = sol.sol(tr.t / omega)[0]
    assert np.max(np.abs(x_phys / d - tr.x)) < 1e-8
