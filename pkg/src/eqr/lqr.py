"""Discrete LQR gain synthesis along a sampled reference.

Gains are precomputed per trajectory sample: linearize the error dynamics,
hold them over one step (zero-order hold via the augmented matrix
exponential), and solve the frozen-time discrete Riccati equation by
fixed-point iteration.  The feedback law applied downstream is
utilde = -K eps.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, linearize

RICCATI_TOL = 1e-10
RICCATI_MAX_ITER = 10_000


class RiccatiError(RuntimeError):
    """Riccati iteration failed to converge; carries the last residual."""

    def __init__(self, iterations, residual, t=None):
        self.iterations = iterations
        self.residual = residual
        self.t = t
        msg = (
            "Riccati iteration did not converge: residual %.3e after %d iterations"
            % (residual, iterations)
        )
        if t is not None:
            msg += " (sample t=%g)" % t
        super().__init__(msg)


@dataclass(frozen=True)
class LqrWeights:
    """Per-step state and input costs (state blocks r, x, v; inputs omega, thrust)."""

    q_r: float = 1.0
    q_x: float = 2.0
    q_v: float = 0.1
    r_omega: float = 0.5
    r_thrust: float = 0.5

    def __post_init__(self):
        for name in ("q_r", "q_x", "q_v", "r_omega", "r_thrust"):
            if not (getattr(self, name) > 0.0):
                raise ValueError("LQR weight %s must be positive" % name)

    def state_cost(self):
        return np.diag([self.q_r] * 3 + [self.q_x] * 3 + [self.q_v] * 3)

    def input_cost(self):
        return np.diag([self.r_omega] * 3 + [self.r_thrust])


@dataclass(frozen=True)
class GainSchedule:
    """Feedback gains, one 4x9 matrix per trajectory sample."""

    times: np.ndarray
    K: np.ndarray


def discretize(A, B, dt):
    """Zero-order-hold discretization of (A, B) over one step."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    return kernels.zoh(
        np.ascontiguousarray(A, dtype=float),
        np.ascontiguousarray(B, dtype=float),
        float(dt),
    )


def dare_gain(Ad, Bd, Q, R, tol=RICCATI_TOL, max_iter=RICCATI_MAX_ITER):
    """Stationary discrete LQR gain by Riccati fixed-point iteration.

    Returns (K, P).  Raises RiccatiError when the update residual has not
    reached tol within max_iter iterations.
    """
    P, K, iters, res = kernels.dare_iterate(
        np.ascontiguousarray(Ad, dtype=float),
        np.ascontiguousarray(Bd, dtype=float),
        np.ascontiguousarray(Q, dtype=float),
        np.ascontiguousarray(R, dtype=float),
        float(tol),
        int(max_iter),
    )
    # not-below rather than above so a NaN residual also raises
    if not res <= tol:
        raise RiccatiError(iters, res)
    return K, P


def schedule_gains(tag, traj, weights, params, dt):
    """Frozen-time LQR gains at every sample of a trajectory."""
    Q = weights.state_cost()
    R = weights.input_cost()
    n = len(traj)
    K = np.empty((n, 4, 9))
    for k in range(n):
        lin = linearize.linearize(tag, traj.sample(k), params)
        Ad, Bd = discretize(lin.A, lin.B, dt)
        try:
            K[k], _ = dare_gain(Ad, Bd, Q, R)
        except RiccatiError as err:
            raise RiccatiError(
                err.iterations, err.residual, t=float(traj.times[k])
            ) from None
    return GainSchedule(traj.times.copy(), K)


def riccati_residuals(Ad, Bd, Q, R, n_iter):
    """Residual history of the Riccati iteration (diagnostic helper)."""
    P = Q.copy()
    out = np.empty(n_iter)
    for i in range(n_iter):
        BtP = Bd.T @ P
        K = np.linalg.solve(R + BtP @ Bd, BtP @ Ad)
        Pn = Q + Ad.T @ (P @ (Ad - Bd @ K))
        Pn = 0.5 * (Pn + Pn.T)
        out[i] = np.linalg.norm(Pn - P, "fro")
        P = Pn
    return out
