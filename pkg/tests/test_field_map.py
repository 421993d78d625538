import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rhdexact.eos import Linear, LogEos, Stiff
from rhdexact.field_map import (
    FieldGradient, FlowClass, classify, four_velocity, kinetic_scalar, map_to_fluid, norm_sq,
)


def test_kinetic_scalar_examples():
    assert kinetic_scalar(FieldGradient(1.0, 0.0)) == 0.5
    assert kinetic_scalar(FieldGradient(1.0, 1.0)) == 0.0
    r = 1.7
    assert kinetic_scalar(FieldGradient(2.0, 1.0, r * 1.0, r=r)) == pytest.approx(1.0)


def test_map_examples():
    st_ = map_to_fluid(FieldGradient(1.0, 0.0), Stiff())
    assert (st_.eps, st_.p, st_.v_r, st_.cls) == (0.5, 0.5, 0.0, FlowClass.PHYSICAL)
    st_ = map_to_fluid(FieldGradient(0.0, 1.0), Stiff())
    assert st_.S == -0.5 and st_.cls is not FlowClass.PHYSICAL
    st_ = map_to_fluid(FieldGradient(2.0, 0.0), Linear(1 / 3))
    assert st_.eps == pytest.approx(12.0) and st_.p == pytest.approx(4.0) and st_.v_r == 0.0
    assert st_.physical


def test_spacelike_gradient_is_tachyonic():
    st_ = map_to_fluid(FieldGradient(0.5, 1.0), Stiff())
    assert st_.cls is FlowClass.TACHYONIC and abs(st_.v_r) > 1


def test_classify_examples():
    assert classify(1, 1) is FlowClass.PHYSICAL
    assert classify(-1, 1) is FlowClass.TACHYONIC
    assert classify(1, -1) is FlowClass.INVALID
    assert classify(0, 1) is FlowClass.INVALID


def test_null_gradient_invalid():
    assert map_to_fluid(FieldGradient(1.0, 1.0), Stiff()).cls is FlowClass.INVALID
    assert map_to_fluid(FieldGradient(1.0, -1.0), Linear(0.5)).cls is FlowClass.INVALID


def test_angular_gradient_needs_radius():
    with pytest.raises(ValueError):
        FieldGradient(1.0, 0.0, 0.1, r=0.0)


timelike = st.tuples(st.floats(-10, 10), st.floats(-0.95, 0.95), st.floats(-0.95, 0.95),
                     st.floats(0.1, 5.0)).filter(lambda a: abs(a[0]) > 1e-3 and a[1] ** 2 + a[2] ** 2 < 0.9)


@given(timelike)
@settings(max_examples=300, deadline=None)
def test_four_velocity_normalized(args):
    dt, a, b, r = args
    # build a timelike gradient with |spatial part| < |d_t|
    g = FieldGradient(dt, a * dt, b * dt * r, r=r)
    u = four_velocity(g)
    assert u[0] > 0
    assert norm_sq(u, r) == pytest.approx(1.0, abs=1e-10)
    st_ = map_to_fluid(g, Stiff())
    assert st_.physical
    assert st_.v_r**2 + (r * st_.v_theta) ** 2 < 1
    # velocity ratios agree with the four-velocity
    assert st_.v_r == pytest.approx(u[1] / u[0], rel=1e-12, abs=1e-14)
    assert st_.v_theta == pytest.approx(u[2] / u[0], rel=1e-12, abs=1e-14)


@given(timelike)
@settings(max_examples=200, deadline=None)
def test_gradient_recovered_from_four_velocity(args):
    dt, a, b, r = args
    g = FieldGradient(dt, a * dt, b * dt * r, r=r)
    u = four_velocity(g)
    x = math.sqrt(2 * kinetic_scalar(g))
    sign = math.copysign(1.0, dt)
    lowered = (u[0], -u[1], -(r**2) * u[2])
    for comp, ref in zip(lowered, (g.d_t, g.d_r, g.d_theta)):
        assert sign * x * comp == pytest.approx(ref, rel=1e-10, abs=1e-10 * abs(dt))


@pytest.mark.parametrize("kappa", [0.1, 1 / 3, 0.75])
def test_linear_relation_pointwise(kappa):
    rng = np.random.default_rng(3)
    for _ in range(200):
        dt = rng.uniform(0.1, 5)
        g = FieldGradient(dt, rng.uniform(-0.99, 0.99) * dt)
        st_ = map_to_fluid(g, Linear(kappa))
        assert abs(st_.p - kappa * st_.eps) <= 1e-12 * st_.eps


def test_log_eos_map_uses_abs_S():
    st_ = map_to_fluid(FieldGradient(0.0 + 0.3, 1.0), LogEos())
    assert st_.cls is FlowClass.TACHYONIC
