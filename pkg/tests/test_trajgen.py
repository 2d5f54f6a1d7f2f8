"""Reference trajectory tests.

Dynamic consistency is the contract: the generated state curve must be an
integral curve of the dynamics under the generated input, checked by
central differences at many sample times.
"""

import math

import numpy as np
import pytest

from eqr import quad, trajgen
from eqr.quad import PhysParams, E3
from eqr.trajgen import (
    FlatOutput,
    TrajectoryError,
    flat_to_sample,
    hover_trajectory,
    lissajous_trajectory,
    sample_trajectory,
)


def fd_consistency(flat, times, params, h=1e-5):
    """Max mismatch between the FD derivative of the sampled reference and
    the dynamics under the sampled input."""
    worst = 0.0
    for t in times:
        s = flat_to_sample(flat, float(t), params)
        sp = flat_to_sample(flat, float(t) + h, params)
        sm = flat_to_sample(flat, float(t) - h, params)
        Rdot, xdot, vdot = quad.dynamics_bar(s.state, s.u, params)
        worst = max(
            worst,
            np.abs((sp.state.R - sm.state.R) / (2 * h) - Rdot).max(),
            np.abs((sp.state.x - sm.state.x) / (2 * h) - xdot).max(),
            np.abs((sp.state.v - sm.state.v) / (2 * h) - vdot).max(),
        )
    return worst


def test_hover_sample(params):
    s = flat_to_sample(hover_trajectory(), 1.3, params)
    np.testing.assert_array_equal(s.state.R, np.eye(3))
    np.testing.assert_array_equal(s.state.x, 0.0)
    np.testing.assert_array_equal(s.state.v, 0.0)
    np.testing.assert_allclose(s.u.omega, 0.0, atol=1e-9)
    assert s.u.thrust == pytest.approx(params.gravity, abs=1e-12)


def test_lissajous_endpoint_values(params):
    flat = lissajous_trajectory()
    np.testing.assert_allclose(flat.position(0.0), [0.5, 0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(flat.velocity(0.0), [0.0, 2.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(
        flat.position(math.pi / 2.0), [-0.5, 0.0, 1.0], atol=1e-15
    )


def test_lissajous_derivatives_are_consistent():
    # acceleration must be the derivative of velocity, velocity of position
    flat = lissajous_trajectory()
    h = 1e-6
    for t in np.linspace(0.0, math.pi, 40):
        vel_fd = (flat.position(t + h) - flat.position(t - h)) / (2 * h)
        acc_fd = (flat.velocity(t + h) - flat.velocity(t - h)) / (2 * h)
        np.testing.assert_allclose(vel_fd, flat.velocity(t), atol=1e-8)
        np.testing.assert_allclose(acc_fd, flat.acceleration(t), atol=1e-7)


def test_lissajous_acceleration_bound():
    flat = lissajous_trajectory()
    grid = np.linspace(0.0, math.pi, 2000)
    mags = [np.linalg.norm(flat.acceleration(t)) for t in grid]
    assert max(mags) <= math.sqrt(4.0 + 64.0) + 1e-12
    assert max(mags) > 8.0


def test_dynamic_consistency_both_trajectories(params):
    times = np.linspace(0.05, math.pi - 0.05, 100)
    assert fd_consistency(hover_trajectory(), times, params) <= 1e-4
    assert fd_consistency(lissajous_trajectory(), times, params) <= 1e-4


def test_reference_rotation_is_orthonormal(params):
    flat = lissajous_trajectory()
    for t in np.linspace(0.0, math.pi, 50):
        R = flat_to_sample(flat, float(t), params).state.R
        assert np.linalg.norm(R.T @ R - np.eye(3)) <= 1e-10
        assert np.linalg.det(R) > 0.0


def test_rate_estimate_is_nearly_skew(params):
    # the raw FD estimate R^T Rdot must be skew to FD accuracy before the
    # projection that extracts the rate vector
    flat = lissajous_trajectory()
    h = trajgen.OMEGA_FD_STEP
    for t in np.linspace(0.1, 3.0, 20):
        R, _ = trajgen._attitude(flat, t, params)
        Rp, _ = trajgen._attitude(flat, t + h, params)
        Rm, _ = trajgen._attitude(flat, t - h, params)
        S = R.T @ ((Rp - Rm) / (2.0 * h))
        sym = 0.5 * (S + S.T)
        assert np.linalg.norm(sym) <= 1e-6


def test_heading_sets_azimuth_of_first_body_axis(params):
    # pure heading at hover: tilt is identity, first body axis points at
    # azimuth alpha
    alpha = 0.7

    def zero3(t):
        return np.zeros(3)

    flat = FlatOutput(zero3, zero3, zero3, heading=lambda t: alpha)
    R = flat_to_sample(flat, 0.0, params).state.R
    b1 = R @ np.array([1.0, 0.0, 0.0])
    assert math.atan2(b1[1], b1[0]) == pytest.approx(alpha, abs=1e-6)
    assert abs(b1[2]) < 1e-12


def test_vanishing_thrust_direction_rejected(params):
    # free fall: required specific force is exactly zero
    def pos(t):
        return np.zeros(3)

    def vel(t):
        return np.zeros(3)

    def acc(t):
        return params.gravity * E3

    flat = FlatOutput(pos, vel, acc, heading=lambda t: 0.0)
    with pytest.raises(TrajectoryError):
        flat_to_sample(flat, 0.0, params)


def test_antipodal_thrust_direction_rejected(params):
    # thrust would have to point straight down
    def acc(t):
        return 2.0 * params.gravity * E3

    zero3 = lambda t: np.zeros(3)
    flat = FlatOutput(zero3, zero3, acc, heading=lambda t: 0.0)
    with pytest.raises(TrajectoryError):
        flat_to_sample(flat, 0.0, params)


def test_sample_trajectory_shape_and_body_velocity(params):
    traj = sample_trajectory(lissajous_trajectory(), math.pi, 0.01, params)
    n = int(math.ceil(math.pi / 0.01 - 1e-9))
    assert len(traj) == n + 1
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(n * 0.01)
    for k in (0, n // 2, n):
        np.testing.assert_allclose(
            traj.R[k] @ traj.vb[k], traj.v[k], atol=1e-9
        )


def test_sample_trajectory_rejects_bad_steps(params):
    with pytest.raises(ValueError):
        sample_trajectory(hover_trajectory(), 1.0, 0.0, params)
    with pytest.raises(ValueError):
        sample_trajectory(hover_trajectory(), -1.0, 0.01, params)
