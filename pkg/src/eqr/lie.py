"""Three Lie group structures on the rotation-position-velocity state space.

All three groups share the carrier SO(3) x R^3 x R^3 but differ in the
product, and therefore in exponential, logarithm and adjoint:

  DIRECT_PRODUCT  componentwise product; vector parts are plain addition.
  EXTENDED_POSE   the 5x5 homogeneous group with two translation columns;
                  rotation mixes into both vector parts.
  POSE_VELOCITY   a pose (4x4 homogeneous) times an additive velocity
                  factor; rotation mixes into position only.

Algebra vectors are flat length-9 arrays in the (r, x, v) layout.  The
translational parts of the EXTENDED_POSE chart, and the position part of the
POSE_VELOCITY chart, go through the SO(3) left Jacobian; all remaining
vector parts use the flat chart.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import (
    ANGLE_EXIT,
    orthonormalize,
    so3_exp,
    so3_left_jacobian,
    so3_left_jacobian_inv,
    so3_log_min,
)


class ChartError(ValueError):
    """Raised when the rotation log is evaluated at (or too near) angle pi."""


class SymmetryError(ValueError):
    """Raised when elements of different symmetries are combined."""


class SymmetryTag(enum.Enum):
    DIRECT_PRODUCT = "dp"
    EXTENDED_POSE = "se23"
    POSE_VELOCITY = "se3r3"

    @property
    def code(self):
        """Small-int tag used by the compiled kernels."""
        return _CODES[self]


_CODES = {
    SymmetryTag.DIRECT_PRODUCT: 0,
    SymmetryTag.EXTENDED_POSE: 1,
    SymmetryTag.POSE_VELOCITY: 2,
}


@dataclass(frozen=True)
class GroupElement:
    """One element (Q, p, gamma) of a chosen symmetry group."""

    symmetry: SymmetryTag
    Q: np.ndarray
    p: np.ndarray
    gamma: np.ndarray


def wedge(w):
    """3-vector to skew matrix."""
    return kernels.skew3(np.asarray(w, dtype=float))


def vee(W):
    """Skew matrix to 3-vector (reads the lower triangle)."""
    return kernels.vee3(np.asarray(W, dtype=float))


def rotation_log(R):
    """SO(3) log as a 3-vector.  Raises ChartError at angle pi."""
    w, angle = so3_log_min(np.asarray(R, dtype=float))
    if angle >= ANGLE_EXIT:
        raise ChartError("rotation angle within 1e-6 of pi: log chart undefined")
    return w


def identity(tag):
    return GroupElement(tag, np.eye(3), np.zeros(3), np.zeros(3))


def _check_same(a, b):
    if a.symmetry is not b.symmetry:
        raise SymmetryError(
            "cannot combine %s with %s" % (a.symmetry.value, b.symmetry.value)
        )


def compose(a, b):
    """Group product a b."""
    _check_same(a, b)
    tag = a.symmetry
    Q = a.Q @ b.Q
    if tag is SymmetryTag.DIRECT_PRODUCT:
        return GroupElement(tag, Q, a.p + b.p, a.gamma + b.gamma)
    if tag is SymmetryTag.EXTENDED_POSE:
        return GroupElement(tag, Q, a.Q @ b.p + a.p, a.Q @ b.gamma + a.gamma)
    return GroupElement(tag, Q, a.Q @ b.p + a.p, a.gamma + b.gamma)


def inverse(a):
    tag = a.symmetry
    Qt = a.Q.T.copy()
    if tag is SymmetryTag.DIRECT_PRODUCT:
        return GroupElement(tag, Qt, -a.p, -a.gamma)
    if tag is SymmetryTag.EXTENDED_POSE:
        return GroupElement(tag, Qt, -(Qt @ a.p), -(Qt @ a.gamma))
    return GroupElement(tag, Qt, -(Qt @ a.p), -a.gamma)


def group_exp(tag, eps):
    """Exponential of an algebra vector (r, x, v) onto the group."""
    eps = np.asarray(eps, dtype=float)
    r = eps[0:3]
    Q = so3_exp(r)
    if tag is SymmetryTag.DIRECT_PRODUCT:
        return GroupElement(tag, Q, eps[3:6].copy(), eps[6:9].copy())
    J = so3_left_jacobian(r)
    if tag is SymmetryTag.EXTENDED_POSE:
        return GroupElement(tag, Q, J @ eps[3:6], J @ eps[6:9])
    return GroupElement(tag, Q, J @ eps[3:6], eps[6:9].copy())


def group_log(a):
    """Inverse of group_exp.  Raises ChartError at rotation angle pi."""
    r = rotation_log(a.Q)
    eps = np.empty(9)
    eps[0:3] = r
    tag = a.symmetry
    if tag is SymmetryTag.DIRECT_PRODUCT:
        eps[3:6] = a.p
        eps[6:9] = a.gamma
        return eps
    Jinv = so3_left_jacobian_inv(r)
    eps[3:6] = Jinv @ a.p
    if tag is SymmetryTag.EXTENDED_POSE:
        eps[6:9] = Jinv @ a.gamma
    else:
        eps[6:9] = a.gamma
    return eps


def adjoint(a, eps):
    """Adjoint action of a on an algebra vector, Ad_a(eps)."""
    eps = np.asarray(eps, dtype=float)
    tag = a.symmetry
    r = a.Q @ eps[0:3]
    out = np.empty(9)
    out[0:3] = r
    if tag is SymmetryTag.DIRECT_PRODUCT:
        out[3:6] = eps[3:6]
        out[6:9] = eps[6:9]
        return out
    out[3:6] = np.cross(a.p, r) + a.Q @ eps[3:6]
    if tag is SymmetryTag.EXTENDED_POSE:
        out[6:9] = np.cross(a.gamma, r) + a.Q @ eps[6:9]
    else:
        out[6:9] = eps[6:9]
    return out


# ---------------------------------------------------------------------------
# Matrix embeddings.  Each symmetry embeds in GL(n) so that the group product
# is the matrix product and right translation is right multiplication; the
# generic error-derivative formula and several oracles run through these.
# ---------------------------------------------------------------------------

EMBED_DIM = {
    SymmetryTag.DIRECT_PRODUCT: 11,
    SymmetryTag.EXTENDED_POSE: 5,
    SymmetryTag.POSE_VELOCITY: 8,
}


def embed(a):
    """Group element as an invertible matrix."""
    tag = a.symmetry
    if tag is SymmetryTag.EXTENDED_POSE:
        M = np.eye(5)
        M[0:3, 0:3] = a.Q
        M[0:3, 3] = a.p
        M[0:3, 4] = a.gamma
        return M
    if tag is SymmetryTag.POSE_VELOCITY:
        M = np.eye(8)
        M[0:3, 0:3] = a.Q
        M[0:3, 3] = a.p
        M[4:7, 7] = a.gamma
        return M
    M = np.eye(11)
    M[0:3, 0:3] = a.Q
    M[3:6, 6] = a.p
    M[7:10, 10] = a.gamma
    return M


def embed_algebra(tag, eps):
    """Algebra vector as a matrix in the embedding's tangent space."""
    eps = np.asarray(eps, dtype=float)
    W = wedge(eps[0:3])
    if tag is SymmetryTag.EXTENDED_POSE:
        M = np.zeros((5, 5))
        M[0:3, 0:3] = W
        M[0:3, 3] = eps[3:6]
        M[0:3, 4] = eps[6:9]
        return M
    if tag is SymmetryTag.POSE_VELOCITY:
        M = np.zeros((8, 8))
        M[0:3, 0:3] = W
        M[0:3, 3] = eps[3:6]
        M[4:7, 7] = eps[6:9]
        return M
    M = np.zeros((11, 11))
    M[0:3, 0:3] = W
    M[3:6, 6] = eps[3:6]
    M[7:10, 10] = eps[6:9]
    return M


def extract(tag, M):
    """Group element back out of an embedding matrix."""
    if tag is SymmetryTag.EXTENDED_POSE:
        return GroupElement(tag, M[0:3, 0:3].copy(), M[0:3, 3].copy(), M[0:3, 4].copy())
    if tag is SymmetryTag.POSE_VELOCITY:
        return GroupElement(tag, M[0:3, 0:3].copy(), M[0:3, 3].copy(), M[4:7, 7].copy())
    return GroupElement(tag, M[0:3, 0:3].copy(), M[3:6, 6].copy(), M[7:10, 10].copy())


def extract_algebra(tag, M):
    """Algebra vector back out of a tangent matrix at the identity."""
    eps = np.empty(9)
    eps[0:3] = vee(M[0:3, 0:3])
    if tag is SymmetryTag.EXTENDED_POSE:
        eps[3:6] = M[0:3, 3]
        eps[6:9] = M[0:3, 4]
    elif tag is SymmetryTag.POSE_VELOCITY:
        eps[3:6] = M[0:3, 3]
        eps[6:9] = M[4:7, 7]
    else:
        eps[3:6] = M[3:6, 6]
        eps[6:9] = M[7:10, 10]
    return eps
