"""Numerically hot kernels shared by the geometry, LQR and simulation layers.

Everything here is flat numpy written so the same source runs two ways:
compiled with numba (the default when numba is importable) or as plain
interpreted numpy when the environment variable EQR_NUMBA is set to
0/false/off.  Compiled kernels keep fastmath off so both paths execute the
same IEEE-754 operations in the same order.

Algebra vectors use the (r, x, v) layout: rotation coordinates first, then
position, then velocity.  Symmetry tags are small ints in this module
(0 direct product, 1 extended pose, 2 pose-velocity); the public enum lives
in eqr.lie.
"""

import math
import os

import numpy as np


def _numba_requested():
    flag = os.environ.get("EQR_NUMBA", "").strip().lower()
    if flag in ("0", "false", "off", "no"):
        return False
    if flag in ("1", "true", "on", "yes"):
        return True
    return None  # auto: use numba if importable


_flag = _numba_requested()
if _flag is False:
    NUMBA_ENABLED = False
else:
    try:
        import numba as _numba

        NUMBA_ENABLED = True
    except ImportError:
        if _flag is True:
            raise
        NUMBA_ENABLED = False

if NUMBA_ENABLED:

    def kernel(fn):
        return _numba.njit(cache=True, nogil=True, fastmath=False)(fn)

else:

    def kernel(fn):
        # keep the .py_func handle the numba dispatcher would expose
        fn.py_func = fn
        return fn


PI = math.pi
# chart exit: the log chart is abandoned this close to the antipode
ANGLE_EXIT = math.pi - 1e-6
# small-angle series take over below this rotation magnitude
SMALL_ANGLE = 1e-4


# ---------------------------------------------------------------------------
# 3x3 helpers (explicit loops: contiguity-agnostic and identical both paths)
# ---------------------------------------------------------------------------


@kernel
def mm3(A, B):
    """3x3 matrix product A B."""
    C = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            C[i, j] = A[i, 0] * B[0, j] + A[i, 1] * B[1, j] + A[i, 2] * B[2, j]
    return C


@kernel
def mtm3(A, B):
    """3x3 matrix product A^T B."""
    C = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            C[i, j] = A[0, i] * B[0, j] + A[1, i] * B[1, j] + A[2, i] * B[2, j]
    return C


@kernel
def mv3(M, v):
    """Matrix-vector product M v."""
    out = np.empty(3)
    for i in range(3):
        out[i] = M[i, 0] * v[0] + M[i, 1] * v[1] + M[i, 2] * v[2]
    return out


@kernel
def mtv3(M, v):
    """Matrix-vector product M^T v."""
    out = np.empty(3)
    for i in range(3):
        out[i] = M[0, i] * v[0] + M[1, i] * v[1] + M[2, i] * v[2]
    return out


@kernel
def skew3(w):
    """Map a 3-vector to the skew matrix with w^x u = w x u."""
    W = np.empty((3, 3))
    W[0, 0] = 0.0
    W[0, 1] = -w[2]
    W[0, 2] = w[1]
    W[1, 0] = w[2]
    W[1, 1] = 0.0
    W[1, 2] = -w[0]
    W[2, 0] = -w[1]
    W[2, 1] = w[0]
    W[2, 2] = 0.0
    return W


@kernel
def vee3(W):
    """Inverse of skew3 on exact skew matrices (reads the lower triangle)."""
    out = np.empty(3)
    out[0] = W[2, 1]
    out[1] = W[0, 2]
    out[2] = W[1, 0]
    return out


# ---------------------------------------------------------------------------
# SO(3) exponential, logarithm and left Jacobian
# ---------------------------------------------------------------------------


@kernel
def so3_exp(w):
    """Rotation exponential, Rodrigues form with a 4th-order series branch."""
    t2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    t = math.sqrt(t2)
    if t < SMALL_ANGLE:
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
    else:
        a = math.sin(t) / t
        b = (1.0 - math.cos(t)) / t2
    W = skew3(w)
    W2 = mm3(W, W)
    R = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            R[i, j] = a * W[i, j] + b * W2[i, j]
        R[i, i] += 1.0
    return R


@kernel
def so3_log_min(R):
    """Rotation log without domain checks.

    Returns (w, angle).  When angle >= ANGLE_EXIT the chart is unusable and
    w comes back zero; callers decide whether that is an error (public API)
    or a divergence event (simulation loop).
    """
    c = 0.5 * (R[0, 0] + R[1, 1] + R[2, 2] - 1.0)
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    t = math.acos(c)
    w = np.zeros(3)
    if t >= ANGLE_EXIT:
        return w, t
    if t < SMALL_ANGLE:
        t2 = t * t
        s = 0.5 * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0)
    else:
        s = 0.5 * t / math.sin(t)
    w[0] = s * (R[2, 1] - R[1, 2])
    w[1] = s * (R[0, 2] - R[2, 0])
    w[2] = s * (R[1, 0] - R[0, 1])
    return w, t


@kernel
def so3_left_jacobian(w):
    """Left Jacobian of the SO(3) exponential."""
    t2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    t = math.sqrt(t2)
    if t < SMALL_ANGLE:
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
        c = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
    else:
        b = (1.0 - math.cos(t)) / t2
        c = (t - math.sin(t)) / (t2 * t)
    W = skew3(w)
    W2 = mm3(W, W)
    J = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            J[i, j] = b * W[i, j] + c * W2[i, j]
        J[i, i] += 1.0
    return J


@kernel
def so3_left_jacobian_inv(w):
    """Inverse left Jacobian, valid for angles below pi."""
    t2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    t = math.sqrt(t2)
    if t < SMALL_ANGLE:
        c = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    else:
        c = 1.0 / t2 - (1.0 + math.cos(t)) / (2.0 * t * math.sin(t))
    W = skew3(w)
    W2 = mm3(W, W)
    J = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            J[i, j] = -0.5 * W[i, j] + c * W2[i, j]
        J[i, i] += 1.0
    return J


@kernel
def orthonormalize(R):
    """Project a near-rotation back onto SO(3).

    Gram-Schmidt on the first two columns, cross product for the third so
    the result has determinant +1.
    """
    out = np.empty((3, 3))
    n0 = math.sqrt(R[0, 0] ** 2 + R[1, 0] ** 2 + R[2, 0] ** 2)
    for i in range(3):
        out[i, 0] = R[i, 0] / n0
    d = out[0, 0] * R[0, 1] + out[1, 0] * R[1, 1] + out[2, 0] * R[2, 1]
    c1 = np.empty(3)
    for i in range(3):
        c1[i] = R[i, 1] - d * out[i, 0]
    n1 = math.sqrt(c1[0] ** 2 + c1[1] ** 2 + c1[2] ** 2)
    for i in range(3):
        out[i, 1] = c1[i] / n1
    out[0, 2] = out[1, 0] * out[2, 1] - out[2, 0] * out[1, 1]
    out[1, 2] = out[2, 0] * out[0, 1] - out[0, 0] * out[2, 1]
    out[2, 2] = out[0, 0] * out[1, 1] - out[1, 0] * out[0, 1]
    return out


# ---------------------------------------------------------------------------
# Matrix exponential, ZOH discretization, Riccati iteration
# ---------------------------------------------------------------------------


@kernel
def expm_ss(M):
    """Matrix exponential by scaling-and-squaring of an order-13 Taylor sum."""
    n = M.shape[0]
    nrm = 0.0
    for j in range(n):
        col = 0.0
        for i in range(n):
            col += abs(M[i, j])
        if col > nrm:
            nrm = col
    s = 0
    while nrm > 0.25 and s < 64:
        nrm *= 0.5
        s += 1
    A = M / (2.0 ** s)
    E = np.eye(n) + A
    T = A.copy()
    for k in range(2, 14):
        T = (T @ A) / k
        E = E + T
    for _ in range(s):
        E = E @ E
    return E


@kernel
def zoh(A, B, dt):
    """Zero-order-hold discretization via the augmented matrix exponential."""
    n = A.shape[0]
    m = B.shape[1]
    M = np.zeros((n + m, n + m))
    M[:n, :n] = A * dt
    M[:n, n:] = B * dt
    E = expm_ss(M)
    Ad = np.ascontiguousarray(E[:n, :n])
    Bd = np.ascontiguousarray(E[:n, n:])
    return Ad, Bd


@kernel
def dare_iterate(Ad, Bd, Q, R, tol, max_iter):
    """Fixed-point Riccati iteration for the discrete LQR.

    Starts from P = Q and stops when the Frobenius norm of the update falls
    to tol.  Returns (P, K, iterations, last_residual); callers must treat
    iterations == max_iter with residual > tol as non-convergence.
    """
    P = Q.copy()
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        BtP = Bd.T @ P
        G = R + BtP @ Bd
        K = np.linalg.solve(G, BtP @ Ad)
        Pn = Q + Ad.T @ (P @ (Ad - Bd @ K))
        Pn = 0.5 * (Pn + Pn.T)
        d = Pn - P
        res = math.sqrt(np.sum(d * d))
        P = Pn
        if res <= tol:
            break
    BtP = Bd.T @ P
    K = np.linalg.solve(R + BtP @ Bd, BtP @ Ad)
    return P, K, it, res


# ---------------------------------------------------------------------------
# Closed-form error linearizations, one per symmetry
# ---------------------------------------------------------------------------


@kernel
def lin_direct_product(Rd, omegad, tbard, c1):
    """(A, B) of the componentwise-error system about a trajectory sample."""
    A = np.zeros((9, 9))
    B = np.zeros((9, 4))
    Wd = skew3(omegad)
    E3 = np.zeros(3)
    E3[2] = 1.0
    RdE3x = mm3(Rd, skew3(E3))
    for i in range(3):
        for j in range(3):
            A[i, j] = -Wd[i, j]
            A[6 + i, j] = tbard * RdE3x[i, j]
        A[3 + i, 6 + i] = 1.0
        A[6 + i, 6 + i] = -c1
        B[i, i] = 1.0
        B[6 + i, 3] = -Rd[i, 2]
    return A, B


@kernel
def lin_extended_pose(omegad, tbard, c1):
    """(A, B) of the extended-pose error system; trajectory enters only
    through omegad and tbard (the group-affine structure)."""
    A = np.zeros((9, 9))
    B = np.zeros((9, 4))
    Wd = skew3(omegad)
    E3 = np.zeros(3)
    E3[2] = 1.0
    E3x = skew3(E3)
    for i in range(3):
        for j in range(3):
            A[i, j] = -Wd[i, j]
            A[3 + i, 3 + j] = -Wd[i, j]
            A[6 + i, j] = tbard * E3x[i, j]
            A[6 + i, 6 + j] = -Wd[i, j]
        A[3 + i, 6 + i] = 1.0
        A[6 + i, 6 + i] += -c1
        B[i, i] = 1.0
    B[8, 3] = -1.0
    return A, B


@kernel
def lin_pose_velocity(Rd, omegad, tbard, vbd, c1, gravity):
    """(A, B) of the pose plus body-velocity error system."""
    A = np.zeros((9, 9))
    B = np.zeros((9, 4))
    Wd = skew3(omegad)
    Vbx = skew3(vbd)
    E3 = np.zeros(3)
    E3[2] = 1.0
    Gx = skew3(mtv3(Rd, E3))
    for i in range(3):
        for j in range(3):
            A[i, j] = -Wd[i, j]
            A[3 + i, j] = -Vbx[i, j]
            A[3 + i, 3 + j] = -Wd[i, j]
            A[6 + i, j] = gravity * Gx[i, j]
            A[6 + i, 6 + j] = -Wd[i, j]
            B[6 + i, j] = Vbx[i, j]
        A[3 + i, 6 + i] = 1.0
        A[6 + i, 6 + i] += -c1
        B[i, i] = 1.0
    B[8, 3] = -1.0
    return A, B


# ---------------------------------------------------------------------------
# Closed-loop trial simulation
# ---------------------------------------------------------------------------


@kernel
def trial_loop(tag, Rd, xd, vd, vbd, omegad, tbard, gains,
               R0, x0, v0, noise, dt, gravity, c1, clamp_thrust):
    """Simulate one closed-loop trial against a sampled reference.

    Reference arrays carry n_steps+1 samples; noise carries n_steps rows of
    (rotation-rate, position-rate, velocity-rate) perturbations.  Record k
    holds the squared attitude/position/velocity errors at t_k plus the norm
    of the commanded rate deviation and the signed thrust deviation.

    Returns (records, diverged, n_valid, max_orthogonality_defect).  On
    divergence (error attitude at the chart boundary, or non-finite state)
    records past n_valid stay zero.
    """
    n_steps = noise.shape[0]
    n_rec = n_steps + 1
    logs = np.zeros((n_rec, 6))
    R = R0.copy()
    x = x0.copy()
    v = v0.copy()
    diverged = False
    n_valid = n_rec
    max_defect = 0.0
    for k in range(n_rec):
        Er = mtm3(Rd[k], R)
        w, angle = so3_log_min(Er)
        ok = angle < ANGLE_EXIT
        for i in range(3):
            if not (math.isfinite(x[i]) and math.isfinite(v[i])):
                ok = False
        if not ok:
            diverged = True
            n_valid = k
            break
        dx = np.empty(3)
        dv = np.empty(3)
        for i in range(3):
            dx[i] = x[i] - xd[k, i]
            dv[i] = v[i] - vd[k, i]
        att = w[0] ** 2 + w[1] ** 2 + w[2] ** 2
        pos = dx[0] ** 2 + dx[1] ** 2 + dx[2] ** 2
        vel = dv[0] ** 2 + dv[1] ** 2 + dv[2] ** 2
        logs[k, 0] = att
        logs[k, 1] = pos
        logs[k, 2] = vel
        logs[k, 3] = att + pos + vel
        # error coordinates in the symmetry's own chart
        eps = np.empty(9)
        for i in range(3):
            eps[i] = w[i]
        if tag == 0:
            for i in range(3):
                eps[3 + i] = dx[i]
                eps[6 + i] = dv[i]
        elif tag == 1:
            Jinv = so3_left_jacobian_inv(w)
            ex = mv3(Jinv, mtv3(Rd[k], dx))
            ev = mv3(Jinv, mtv3(Rd[k], dv))
            for i in range(3):
                eps[3 + i] = ex[i]
                eps[6 + i] = ev[i]
        else:
            Jinv = so3_left_jacobian_inv(w)
            ex = mv3(Jinv, mtv3(Rd[k], dx))
            vb = mtv3(R, v)
            for i in range(3):
                eps[3 + i] = ex[i]
                eps[6 + i] = vb[i] - vbd[k, i]
        ut = -(gains[k] @ eps)
        logs[k, 4] = math.sqrt(ut[0] ** 2 + ut[1] ** 2 + ut[2] ** 2)
        logs[k, 5] = ut[3]
        if k == n_steps:
            break
        om = np.empty(3)
        for i in range(3):
            om[i] = omegad[k, i] + ut[i] + noise[k, i]
        tb = tbard[k] + ut[3]
        if clamp_thrust:
            # optional floor: reconstructed physical thrust kept >= 0
            tphys = tb + c1 * (R[0, 2] * v[0] + R[1, 2] * v[1] + R[2, 2] * v[2])
            if tphys < 0.0:
                tb = tb - tphys
        # translational RK4 with the held rate's exact in-step rotation:
        # R(s) = R exp(s om^) so the thrust axis is evaluated at each stage
        dw = np.empty(3)
        for i in range(3):
            dw[i] = 0.5 * dt * om[i]
        Rh = mm3(R, so3_exp(dw))
        for i in range(3):
            dw[i] = dt * om[i]
        Rf = mm3(R, so3_exp(dw))
        a1 = np.empty(3)
        a2 = np.empty(3)
        a4 = np.empty(3)
        for i in range(3):
            a1[i] = -tb * R[i, 2]
            a2[i] = -tb * Rh[i, 2]
            a4[i] = -tb * Rf[i, 2]
        a1[2] += gravity
        a2[2] += gravity
        a4[2] += gravity
        xn = np.empty(3)
        vn = np.empty(3)
        for i in range(3):
            nx = noise[k, 3 + i]
            nv = noise[k, 6 + i]
            k1x = v[i] + nx
            k1v = a1[i] - c1 * v[i] + nv
            v2 = v[i] + 0.5 * dt * k1v
            k2x = v2 + nx
            k2v = a2[i] - c1 * v2 + nv
            v3 = v[i] + 0.5 * dt * k2v
            k3x = v3 + nx
            k3v = a2[i] - c1 * v3 + nv
            v4 = v[i] + dt * k3v
            k4x = v4 + nx
            k4v = a4[i] - c1 * v4 + nv
            xn[i] = x[i] + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            vn[i] = v[i] + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        x = xn
        v = vn
        R = orthonormalize(Rf)
        S = mtm3(R, R)
        defect = 0.0
        for i in range(3):
            for j in range(3):
                d = S[i, j] - (1.0 if i == j else 0.0)
                defect += d * d
        defect = math.sqrt(defect)
        if defect > max_defect:
            max_defect = defect
    return logs, diverged, n_valid, max_defect
