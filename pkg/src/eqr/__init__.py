"""Equivariant-error LQR tracking for a quadrotor, three symmetries side by side.

The package builds one controller design three times, once per Lie group
structure on the rotation-position-velocity state space, and benchmarks them
on the same Monte Carlo draws: lift the compensated-thrust dynamics to the
group, chart the group-valued tracking error through the log, linearize,
and run a gain-scheduled discrete LQR on the chart coordinates.
"""

__version__ = "0.1.0"

from .lie import SymmetryTag
from .lqr import LqrWeights
from .quad import ControlInput, PhysParams, QuadState
from .sim import SimConfig, run_campaign, run_trial
from .trajgen import hover_trajectory, lissajous_trajectory

__all__ = [
    "SymmetryTag",
    "LqrWeights",
    "ControlInput",
    "PhysParams",
    "QuadState",
    "SimConfig",
    "run_campaign",
    "run_trial",
    "hover_trajectory",
    "lissajous_trajectory",
    "__version__",
]
