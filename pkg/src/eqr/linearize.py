"""Linearized error dynamics about a trajectory sample, per symmetry.

Each symmetry's group-valued tracking error, written in exponential
coordinates eps = (r, x, v), obeys eps_dot = A eps + B utilde to first
order, with utilde = (omega - omega_d, tbar - tbar_d).  The closed forms
live in the compiled kernels; numeric_linearize rebuilds (A, B) from
nothing but the error-derivative formula and finite differences, and is the
arbiter whenever a closed-form entry is in doubt.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, lie, quad
from .lie import SymmetryTag
from .quad import ControlInput

# outer step for the A/B columns; inner horizon for the log derivative
FD_STEP = 1e-6
FD_FLOW = 1e-5


@dataclass(frozen=True)
class LinearizedSystem:
    """Frozen-time error linearization (A: 9x9, B: 9x4) at time t."""

    t: float
    A: np.ndarray
    B: np.ndarray


def linearize_direct_product(sample, params):
    A, B = kernels.lin_direct_product(
        np.ascontiguousarray(sample.state.R),
        np.ascontiguousarray(sample.u.omega),
        float(sample.u.thrust),
        params.c1,
    )
    return LinearizedSystem(sample.t, A, B)


def linearize_extended_pose(sample, params):
    A, B = kernels.lin_extended_pose(
        np.ascontiguousarray(sample.u.omega),
        float(sample.u.thrust),
        params.c1,
    )
    return LinearizedSystem(sample.t, A, B)


def linearize_pose_velocity(sample, params):
    vbd = sample.state.R.T @ sample.state.v
    A, B = kernels.lin_pose_velocity(
        np.ascontiguousarray(sample.state.R),
        np.ascontiguousarray(sample.u.omega),
        float(sample.u.thrust),
        np.ascontiguousarray(vbd),
        params.c1,
        params.gravity,
    )
    return LinearizedSystem(sample.t, A, B)


_CLOSED_FORMS = {
    SymmetryTag.DIRECT_PRODUCT: "linearize_direct_product",
    SymmetryTag.EXTENDED_POSE: "linearize_extended_pose",
    SymmetryTag.POSE_VELOCITY: "linearize_pose_velocity",
}


def linearize(tag, sample, params):
    """Closed-form (A, B) for the chosen symmetry.

    Dispatches through the module namespace so a patched closed form is
    picked up (the self-check command relies on this to prove it can catch
    a wrong sign).
    """
    return globals()[_CLOSED_FORMS[tag]](sample, params)


def _native_state(tag, sample):
    if tag is SymmetryTag.POSE_VELOCITY:
        return quad.body_view(sample.state)
    return sample.state


def _eps_dot(tag, Xd, ud, params, eps, utilde):
    """Exact chart velocity at (eps, utilde) up to O(FD_FLOW^2).

    The group error E = exp(eps) flows exactly along exp(s W) E for the
    frozen error-derivative W, so a central difference of log over that
    flow evaluates the derivative of the chart without a closed-form
    differential of log.
    """
    E0 = lie.group_exp(tag, eps)
    u = ControlInput(ud.omega + utilde[0:3], ud.thrust + float(utilde[3]))
    W = quad.error_derivative(tag, Xd, E0, u, ud, params)
    d = FD_FLOW
    Ep = lie.compose(lie.group_exp(tag, d * W), E0)
    Em = lie.compose(lie.group_exp(tag, -d * W), E0)
    return (lie.group_log(Ep) - lie.group_log(Em)) / (2.0 * d)


def numeric_linearize(tag, sample, params):
    """(A, B) by central differences of the chart velocity at the origin.

    Independent of the closed forms: only group operations and the
    error-derivative formula are used.
    """
    Xd = quad.state_to_group(tag, _native_state(tag, sample))
    ud = sample.u
    h = FD_STEP
    A = np.empty((9, 9))
    B = np.empty((9, 4))
    z9 = np.zeros(9)
    z4 = np.zeros(4)
    for j in range(9):
        e = np.zeros(9)
        e[j] = h
        dp = _eps_dot(tag, Xd, ud, params, e, z4)
        dm = _eps_dot(tag, Xd, ud, params, -e, z4)
        A[:, j] = (dp - dm) / (2.0 * h)
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        dp = _eps_dot(tag, Xd, ud, params, z9, e)
        dm = _eps_dot(tag, Xd, ud, params, z9, -e)
        B[:, j] = (dp - dm) / (2.0 * h)
    return LinearizedSystem(sample.t, A, B)
