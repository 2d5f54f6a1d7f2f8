"""Shared helpers for the test suite.

Property tests draw from seeded generators so every run sees the same
samples; the helpers below build random rotations, group elements, states
and inputs with controllable magnitudes.
"""

import numpy as np
import pytest

from eqr.kernels import so3_exp
from eqr.lie import GroupElement, SymmetryTag
from eqr.quad import ControlInput, PhysParams, QuadState

ALL_TAGS = (
    SymmetryTag.DIRECT_PRODUCT,
    SymmetryTag.EXTENDED_POSE,
    SymmetryTag.POSE_VELOCITY,
)


def rng(seed):
    return np.random.default_rng(seed)


def random_rotation(gen, max_angle=np.pi - 0.2):
    axis = gen.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = gen.uniform(0.0, max_angle)
    return so3_exp(angle * axis)


def random_element(tag, gen, max_angle=np.pi - 0.2, scale=1.0):
    return GroupElement(
        tag,
        random_rotation(gen, max_angle),
        scale * gen.normal(size=3),
        scale * gen.normal(size=3),
    )


def random_state(gen, max_angle=np.pi - 0.2, scale=1.0):
    return QuadState(
        random_rotation(gen, max_angle),
        scale * gen.normal(size=3),
        scale * gen.normal(size=3),
    )


def random_input(gen, rate_scale=1.0, thrust_lo=2.0, thrust_hi=18.0):
    return ControlInput(
        rate_scale * gen.normal(size=3),
        float(gen.uniform(thrust_lo, thrust_hi)),
    )


@pytest.fixture
def params():
    return PhysParams()
