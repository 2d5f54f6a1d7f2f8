"""Quadrotor kinematics, compensated-thrust dynamics, and their symmetry lifts.

The vehicle model is the usual rigid body with rotor drag linear in the
airspeed.  Working with the compensated thrust (the commanded thrust minus
the drag component along the body vertical) turns the velocity equation into

    vdot = -tbar R e3 + g e3 - c1 v

which is what every lift, error system and linearization here is built on.
Thrust and gravity are mass-normalized throughout; the physical mass only
enters when converting between raw and compensated thrust.
"""

from dataclasses import dataclass

import numpy as np

from . import lie
from .lie import GroupElement, SymmetryTag

E3 = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class PhysParams:
    """Physical constants: mass, gravity, and the rotor drag coefficient."""

    mass: float = 1.0
    gravity: float = 9.81
    c1: float = 0.25

    def __post_init__(self):
        if not (self.mass > 0.0):
            raise ValueError("mass must be positive")
        if self.c1 < 0.0:
            raise ValueError("drag coefficient c1 must be non-negative")


@dataclass(frozen=True)
class QuadState:
    """Attitude, position and inertial velocity.

    The POSE_VELOCITY symmetry works in the body-velocity view v_b = R^T v;
    use body_view / inertial_view to cross between the two conventions.
    """

    R: np.ndarray
    x: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class ControlInput:
    """Body angular velocity and mass-normalized compensated thrust."""

    omega: np.ndarray
    thrust: float


@dataclass(frozen=True)
class ExtendedInput:
    """Symmetry-extended input: rates, vector thrust, gravity and wind."""

    omega: np.ndarray
    thrust_vec: np.ndarray
    gravity_vec: np.ndarray
    wind: np.ndarray


def body_view(state):
    """Same physical state with the velocity slot holding v_b = R^T v."""
    return QuadState(state.R, state.x, state.R.T @ state.v)


def inertial_view(state_b):
    """Inverse of body_view."""
    return QuadState(state_b.R, state_b.x, state_b.R @ state_b.v)


def compensate_thrust(thrust, R, v, params):
    """Compensated thrust: mass-normalized thrust minus the vertical drag term."""
    return thrust / params.mass - params.c1 * float(E3 @ (R.T @ v))


def raw_thrust(tbar, R, v, params):
    """Physical thrust back from the compensated value (exact inverse)."""
    return params.mass * (tbar + params.c1 * float(E3 @ (R.T @ v)))


def dynamics_raw(state, omega, thrust, params):
    """Rigid-body dynamics with the full anisotropic rotor-drag force.

    Returns (Rdot, xdot, vdot) for physical thrust along the body vertical
    and drag D = c1 (I - e3 e3^T) acting on the body-frame airspeed.
    """
    R, x, v = state.R, state.x, state.v
    D = params.c1 * (np.eye(3) - np.outer(E3, E3))
    Rdot = R @ lie.wedge(omega)
    vdot = (
        -(thrust / params.mass) * (R @ E3)
        + params.gravity * E3
        - R @ D @ (R.T @ v)
    )
    return Rdot, v.copy(), vdot


def dynamics_bar(state, u, params):
    """Compensated-thrust dynamics (Rdot, xdot, vdot) with isotropic drag."""
    R, x, v = state.R, state.x, state.v
    Rdot = R @ lie.wedge(u.omega)
    vdot = -u.thrust * (R @ E3) + params.gravity * E3 - params.c1 * v
    return Rdot, v.copy(), vdot


def dynamics_bar_body(state_b, u, params):
    """Compensated-thrust dynamics in the body-velocity view.

    state_b carries v_b = R^T v; returns (Rdot, xdot, vb_dot).
    """
    R, x, vb = state_b.R, state_b.x, state_b.v
    Rdot = R @ lie.wedge(u.omega)
    vbdot = (
        -np.cross(u.omega, vb)
        - u.thrust * E3
        + params.gravity * (R.T @ E3)
        - params.c1 * vb
    )
    return Rdot, R @ vb, vbdot


def state_to_group(tag, state):
    """Identify a state with a group element (body-velocity view for
    POSE_VELOCITY, inertial for the other two)."""
    return GroupElement(tag, state.R.copy(), state.x.copy(), state.v.copy())


def group_to_state(X):
    return QuadState(X.Q, X.p, X.gamma)


def lift(tag, state, u, params):
    """Algebra-valued lift of the compensated dynamics for one symmetry.

    Right-translating the result by the group element identified with the
    state reproduces the state derivative.  For POSE_VELOCITY the state must
    be in the body-velocity view.
    """
    R, x, v = state.R, state.x, state.v
    lam = np.empty(9)
    lam_r = R @ lie.wedge(u.omega) @ R.T
    lam[0:3] = lie.vee(lam_r)
    if tag is SymmetryTag.DIRECT_PRODUCT:
        lam[3:6] = v
        lam[6:9] = -u.thrust * (R @ E3) + params.gravity * E3 - params.c1 * v
        return lam
    if tag is SymmetryTag.EXTENDED_POSE:
        lam[3:6] = -lam_r @ x + v
        lam[6:9] = (
            -lam_r @ v
            - u.thrust * (R @ E3)
            + params.gravity * E3
            - params.c1 * v
        )
        return lam
    # pose-velocity: v is the body velocity here
    lam[3:6] = -lam_r @ x + R @ v
    lam[6:9] = (
        -np.cross(u.omega, v)
        - u.thrust * E3
        + params.gravity * (R.T @ E3)
        - params.c1 * v
    )
    return lam


def reconstructed_derivative(tag, state, u, params):
    """State derivative recovered by right-translating the lift.

    Goes through the matrix embedding, so it exercises a code path fully
    independent of dynamics_bar; the two must agree.  Returns
    (Rdot, xdot, vdot) in the symmetry's own velocity convention.
    """
    X = state_to_group(tag, state)
    M = lie.embed_algebra(tag, lift(tag, state, u, params)) @ lie.embed(X)
    if tag is SymmetryTag.EXTENDED_POSE:
        return M[0:3, 0:3], M[0:3, 3], M[0:3, 4]
    if tag is SymmetryTag.POSE_VELOCITY:
        return M[0:3, 0:3], M[0:3, 3], M[4:7, 7]
    return M[0:3, 0:3], M[3:6, 6], M[7:10, 10]


def equivariant_error(tag, state_d, state):
    """Group-valued tracking error E = X_d^{-1} X.

    Both states must be in the symmetry's velocity convention (body view
    for POSE_VELOCITY).
    """
    Xd = state_to_group(tag, state_d)
    X = state_to_group(tag, state)
    return lie.compose(lie.inverse(Xd), X)


def error_derivative(tag, Xd, E, u, ud, params):
    """Algebra vector W with Edot = W^wedge E, from the tracking pair.

    W = Ad_{Xd^{-1}}( lift(Xd E, u) - lift(Xd, ud) ); the reference runs
    under ud while the vehicle at X = Xd E runs under u.
    """
    X = lie.compose(Xd, E)
    lam = lift(tag, group_to_state(X), u, params)
    lam_d = lift(tag, group_to_state(Xd), ud, params)
    return lie.adjoint(lie.inverse(Xd), lam - lam_d)


def extended_lift(state_b, u_ext, params):
    """Lift of the wind-extended system on the pose-velocity group.

    state_b is the body-velocity view; u_ext carries vector thrust, a free
    gravity vector and a wind velocity.  At wind zero, vertical vector
    thrust tbar*e3 and gravity g*e3 this reduces to the physical
    POSE_VELOCITY lift.
    """
    R, x, vb = state_b.R, state_b.x, state_b.v
    rel = vb - u_ext.wind
    lam = np.empty(9)
    lam_r = R @ lie.wedge(u_ext.omega) @ R.T
    lam[0:3] = lie.vee(lam_r)
    lam[3:6] = -lam_r @ x + R @ rel
    lam[6:9] = (
        -np.cross(u_ext.omega, rel)
        - u_ext.thrust_vec
        + R.T @ u_ext.gravity_vec
        - params.c1 * rel
    )
    return lam


def input_action(Y, u_ext):
    """Action of a pose-velocity group element on the extended input."""
    if Y.symmetry is not SymmetryTag.POSE_VELOCITY:
        raise lie.SymmetryError("input action is defined on the pose-velocity group")
    return ExtendedInput(
        u_ext.omega.copy(),
        u_ext.thrust_vec.copy(),
        Y.Q @ u_ext.gravity_vec,
        u_ext.wind + Y.gamma,
    )


def physical_extended_input(u, params):
    """Embed a physical input into the extended input space (zero wind)."""
    return ExtendedInput(
        u.omega.copy(), u.thrust * E3, params.gravity * E3, np.zeros(3)
    )
