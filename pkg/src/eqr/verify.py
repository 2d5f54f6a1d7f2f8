"""Self-contained consistency checks runnable from the command line.

Each check pits two independent routes at each other: lifts against raw
dynamics through the matrix embeddings, closed-form linearizations against
finite differences, symmetry identities against direct evaluation.  A wrong
sign anywhere in the geometry shows up here before it shows up as a subtly
wrong Monte Carlo plot.
"""

from dataclasses import dataclass

import numpy as np

from . import lie, linearize, quad, trajgen
from .lie import SymmetryTag
from .quad import ControlInput, PhysParams, QuadState


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self):
        return self.residual <= self.tol


def _rng():
    return np.random.Generator(np.random.Philox(key=np.array([0x5EED, 0], dtype=np.uint64)))


def _random_rotation(rng, max_angle=2.5):
    w = rng.standard_normal(3)
    w *= rng.uniform(0.1, max_angle) / np.linalg.norm(w)
    return lie.so3_exp(w)


def _random_state(rng):
    return QuadState(
        _random_rotation(rng), 2.0 * rng.standard_normal(3), 2.0 * rng.standard_normal(3)
    )


def _random_input(rng):
    return ControlInput(rng.standard_normal(3), float(rng.uniform(5.0, 15.0)))


def check_lift_reconstruction(params=None, n=25):
    """Right-translated lift must reproduce the state derivative."""
    params = params or PhysParams()
    rng = _rng()
    worst = 0.0
    for tag in SymmetryTag:
        for _ in range(n):
            state = _random_state(rng)
            u = _random_input(rng)
            Rdot_e, xdot_e, vdot_e = quad.reconstructed_derivative(tag, state, u, params)
            if tag is SymmetryTag.POSE_VELOCITY:
                Rdot, xdot, vdot = quad.dynamics_bar_body(state, u, params)
            else:
                Rdot, xdot, vdot = quad.dynamics_bar(state, u, params)
            worst = max(
                worst,
                float(np.max(np.abs(Rdot_e - Rdot))),
                float(np.max(np.abs(xdot_e - xdot))),
                float(np.max(np.abs(vdot_e - vdot))),
            )
    return CheckResult("lift reconstructs dynamics (all symmetries)", worst, 1e-10)


def check_extended_equivariance(params=None, n=25):
    """The wind-extended lift must intertwine the group and input actions."""
    params = params or PhysParams()
    rng = _rng()
    tag = SymmetryTag.POSE_VELOCITY
    worst = 0.0
    for _ in range(n):
        X = quad.state_to_group(tag, _random_state(rng))
        Y = quad.state_to_group(tag, _random_state(rng))
        u_ext = quad.ExtendedInput(
            rng.standard_normal(3),
            rng.standard_normal(3) * 4.0,
            rng.standard_normal(3) * 4.0,
            rng.standard_normal(3),
        )
        lhs = lie.adjoint(Y, quad.extended_lift(quad.group_to_state(X), u_ext, params))
        YX = lie.compose(Y, X)
        rhs = quad.extended_lift(quad.group_to_state(YX), quad.input_action(Y, u_ext), params)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult("extended-input lift equivariance", worst, 1e-10)


def check_group_affine(params=None, n=25):
    """Extended-pose error dynamics must not depend on the reference point."""
    params = params or PhysParams()
    rng = _rng()
    tag = SymmetryTag.EXTENDED_POSE
    ident = quad.group_to_state(lie.identity(tag))
    worst = 0.0
    for _ in range(n):
        Xd = quad.state_to_group(tag, _random_state(rng))
        E = quad.state_to_group(tag, _random_state(rng))
        u = _random_input(rng)
        ud = _random_input(rng)
        W1 = quad.error_derivative(tag, Xd, E, u, ud, params)
        W2 = quad.lift(tag, quad.group_to_state(E), u, params) - quad.lift(
            tag, ident, ud, params
        )
        worst = max(worst, float(np.max(np.abs(W1 - W2))))
    return CheckResult("group-affine error dynamics (extended pose)", worst, 1e-10)


def check_hover_linearization(params=None):
    """At hover all three closed-form linearizations coincide."""
    params = params or PhysParams()
    sample = trajgen.flat_to_sample(trajgen.hover_trajectory(), 0.5, params)
    systems = [linearize.linearize(tag, sample, params) for tag in SymmetryTag]
    worst = 0.0
    for s in systems[1:]:
        worst = max(
            worst,
            float(np.max(np.abs(s.A - systems[0].A))),
            float(np.max(np.abs(s.B - systems[0].B))),
        )
    return CheckResult("hover linearizations coincide", worst, 1e-12)


def check_fd_linearization(params=None, times=(0.3, 0.9, 1.7)):
    """Closed forms must match the finite-difference linearization."""
    params = params or PhysParams()
    flat = trajgen.lissajous_trajectory()
    worst = 0.0
    for t in times:
        sample = trajgen.flat_to_sample(flat, t, params)
        for tag in SymmetryTag:
            closed = linearize.linearize(tag, sample, params)
            fd = linearize.numeric_linearize(tag, sample, params)
            worst = max(
                worst,
                float(np.max(np.abs(closed.A - fd.A))),
                float(np.max(np.abs(closed.B - fd.B))),
            )
    return CheckResult("closed-form vs finite-difference linearization", worst, 1e-5)


def run_all(params=None):
    return [
        check_lift_reconstruction(params),
        check_extended_equivariance(params),
        check_group_affine(params),
        check_hover_linearization(params),
        check_fd_linearization(params),
    ]
