"""Reference trajectories from differentially flat outputs.

A flat output is a smooth position curve plus a heading angle.  The
compensated-thrust model lets every remaining reference quantity be read off
the flat output: velocity is the first derivative, the thrust direction and
magnitude come from the acceleration, and the body rates follow by finite
differencing the attitude.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernels import so3_exp
from .quad import E3, ControlInput, QuadState

# attitude finite-difference step for the reference body rates
OMEGA_FD_STEP = 1e-5


class TrajectoryError(ValueError):
    """Raised when a flat output is dynamically infeasible at some time."""


@dataclass(frozen=True)
class FlatOutput:
    """Flat output: position with two analytic derivatives, plus heading."""

    position: Callable[[float], np.ndarray]
    velocity: Callable[[float], np.ndarray]
    acceleration: Callable[[float], np.ndarray]
    heading: Callable[[float], float]


@dataclass(frozen=True)
class TrajectorySample:
    """Reference state and input at one time."""

    t: float
    state: QuadState
    u: ControlInput


@dataclass(frozen=True)
class Trajectory:
    """Dense reference sampled once per control step (plus the endpoint)."""

    times: np.ndarray
    R: np.ndarray
    x: np.ndarray
    v: np.ndarray
    vb: np.ndarray
    omega: np.ndarray
    tbar: np.ndarray

    def sample(self, k):
        return TrajectorySample(
            float(self.times[k]),
            QuadState(self.R[k], self.x[k], self.v[k]),
            ControlInput(self.omega[k], float(self.tbar[k])),
        )

    def __len__(self):
        return self.times.shape[0]


def hover_trajectory():
    """Regulation to the origin with zero heading."""
    zero3 = np.zeros(3)
    return FlatOutput(
        position=lambda t: zero3.copy(),
        velocity=lambda t: zero3.copy(),
        acceleration=lambda t: zero3.copy(),
        heading=lambda t: 0.0,
    )


def lissajous_trajectory():
    """Planar-figure sweep at constant altitude, zero heading."""

    def pos(t):
        return 0.5 * np.array([math.cos(2.0 * t), math.sin(4.0 * t), 2.0])

    def vel(t):
        return np.array([-math.sin(2.0 * t), 2.0 * math.cos(4.0 * t), 0.0])

    def acc(t):
        return np.array([-2.0 * math.cos(2.0 * t), -8.0 * math.sin(4.0 * t), 0.0])

    return FlatOutput(pos, vel, acc, heading=lambda t: 0.0)


def _attitude(flat, t, params):
    """Reference attitude: yaw about the world vertical composed with the
    tilt taking e3 onto the required thrust direction."""
    f = -flat.acceleration(t) + params.gravity * E3 - params.c1 * flat.velocity(t)
    tbar = float(np.linalg.norm(f))
    if tbar < 1e-9:
        raise TrajectoryError("thrust direction vanishes at t=%g" % t)
    b3 = f / tbar
    cos_t = float(E3 @ b3)
    cos_t = min(1.0, max(-1.0, cos_t))
    theta = math.acos(cos_t)
    if theta >= math.pi - 1e-8:
        raise TrajectoryError("thrust direction antipodal to vertical at t=%g" % t)
    if theta < 1e-8:
        tilt = np.eye(3)
    else:
        axis = np.cross(E3, b3)
        axis = axis / np.linalg.norm(axis)
        tilt = so3_exp(theta * axis)
    yaw = so3_exp(flat.heading(t) * E3)
    return yaw @ tilt, tbar


def flat_to_sample(flat, t, params):
    """Reference state and input at time t.

    Body rates come from a central difference of the attitude; projecting
    onto the skew part discards the symmetric finite-difference noise.
    """
    Rd, tbar = _attitude(flat, t, params)
    h = OMEGA_FD_STEP
    Rp, _ = _attitude(flat, t + h, params)
    Rm, _ = _attitude(flat, t - h, params)
    S = Rd.T @ ((Rp - Rm) / (2.0 * h))
    S = 0.5 * (S - S.T)
    omega = np.array([S[2, 1], S[0, 2], S[1, 0]])
    state = QuadState(Rd, flat.position(t), flat.velocity(t))
    return TrajectorySample(t, state, ControlInput(omega, tbar))


def sample_trajectory(flat, duration, dt, params):
    """Sample a flat output at the control rate over [0, duration].

    Produces ceil(duration/dt)+1 samples so the endpoint always has one.
    """
    if dt <= 0.0 or duration <= 0.0:
        raise ValueError("duration and dt must be positive")
    n = int(math.ceil(duration / dt - 1e-9))
    times = np.arange(n + 1) * dt
    R = np.empty((n + 1, 3, 3))
    x = np.empty((n + 1, 3))
    v = np.empty((n + 1, 3))
    vb = np.empty((n + 1, 3))
    omega = np.empty((n + 1, 3))
    tbar = np.empty(n + 1)
    for k, t in enumerate(times):
        s = flat_to_sample(flat, float(t), params)
        R[k] = s.state.R
        x[k] = s.state.x
        v[k] = s.state.v
        vb[k] = s.state.R.T @ s.state.v
        omega[k] = s.u.omega
        tbar[k] = s.u.thrust
    return Trajectory(times, R, x, v, vb, omega, tbar)
