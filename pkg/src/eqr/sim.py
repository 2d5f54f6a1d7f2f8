"""Closed-loop Monte Carlo harness.

One trial perturbs the initial state, then runs the gain-scheduled feedback
at the control rate: the group-valued tracking error is charted through the
symmetry's log, the LQR gain maps it to rate and thrust deviations, and the
physical state integrates forward with optional process noise.  Campaigns
run many trials per symmetry with paired noise streams so differences
between symmetries are never sampling artifacts.

Randomness comes from the Philox counter-based generator.  Stream keys are
(seed, trial*16 + channel) with channel 0 the initial perturbation and
channel 1 the process noise; the symmetry tag is deliberately absent so the
same trial index sees identical draws under every symmetry.
"""

import hashlib
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels, lie, lqr, quad, trajgen
from .lie import SymmetryTag
from .quad import ControlInput, E3, PhysParams, QuadState

ALL_SYMMETRIES = (
    SymmetryTag.DIRECT_PRODUCT,
    SymmetryTag.EXTENDED_POSE,
    SymmetryTag.POSE_VELOCITY,
)

TRAJECTORIES = {
    "hover": trajgen.hover_trajectory,
    "lissajous": trajgen.lissajous_trajectory,
}

# substream channels under one (seed, trial)
CHANNEL_INIT = 0
CHANNEL_PROCESS = 1


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    duration: float = math.pi
    trajectory: str = "hover"
    symmetries: tuple = ALL_SYMMETRIES
    trials: int = 200
    seed: int = 0
    init_std: tuple = (0.8, 0.6, 0.3)
    process_std: float = 0.1
    weights: lqr.LqrWeights = field(default_factory=lqr.LqrWeights)
    phys: PhysParams = field(default_factory=PhysParams)
    clamp_thrust: bool = False

    def __post_init__(self):
        if self.trajectory not in TRAJECTORIES:
            raise ValueError("unknown trajectory %r" % (self.trajectory,))
        if self.dt <= 0.0 or self.duration <= 0.0:
            raise ValueError("dt and duration must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if min(self.init_std) < 0.0 or self.process_std < 0.0:
            raise ValueError("noise levels must be non-negative")


@dataclass(frozen=True)
class TrialLog:
    """Per-step records of one trial.

    Record columns: squared attitude / position / velocity error, their
    sum, norm of the commanded rate deviation, signed thrust deviation.
    Diverged trials stop at n_valid records.
    """

    symmetry: SymmetryTag
    trial: int
    times: np.ndarray
    records: np.ndarray
    diverged: bool
    n_valid: int
    max_defect: float
    stream_fingerprint: str


@dataclass(frozen=True)
class TrialContext:
    """Reference and gains shared by every trial of one symmetry."""

    config: SimConfig
    symmetry: SymmetryTag
    traj: trajgen.Trajectory
    gains: lqr.GainSchedule


@dataclass(frozen=True)
class CampaignSummary:
    """Aggregate of a multi-symmetry campaign.

    band maps symmetry -> (3, n_times) array of p05/p50/p95 of the total
    squared error; rmse maps symmetry -> per-trial RMSE values and
    rmse_percentiles to their (p20, p50, p80).
    """

    config: SimConfig
    times: np.ndarray
    band: dict
    valid_counts: dict
    rmse: dict
    rmse_percentiles: dict
    diverged: dict
    logs: dict


def percentile(values, p):
    """Percentile with linear interpolation between order statistics."""
    return float(np.percentile(np.asarray(values, dtype=float), p))


def thread_count():
    """Trial parallelism cap from EQR_THREADS (0 or unset = auto)."""
    raw = os.environ.get("EQR_THREADS", "").strip()
    n = int(raw) if raw else 0
    if n < 0:
        raise ValueError("EQR_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def stream_key(seed, trial, channel):
    return np.array([seed, trial * 16 + channel], dtype=np.uint64)


def stream_generator(seed, trial, channel):
    return np.random.Generator(np.random.Philox(key=stream_key(seed, trial, channel)))


def draw_trial_streams(cfg, trial, n_steps):
    """Initial-perturbation and process-noise draws for one trial.

    Independent of the symmetry by construction.  Returns (eta, noise,
    fingerprint) with eta the 9 scaled initial offsets and noise the
    (n_steps, 9) additive rates.
    """
    scale = np.repeat(np.asarray(cfg.init_std, dtype=float), 3)
    eta = stream_generator(cfg.seed, trial, CHANNEL_INIT).standard_normal(9) * scale
    noise = (
        stream_generator(cfg.seed, trial, CHANNEL_PROCESS).standard_normal((n_steps, 9))
        * cfg.process_std
    )
    digest = hashlib.sha256()
    digest.update(eta.tobytes())
    digest.update(noise.tobytes())
    return eta, noise, digest.hexdigest()


def perturb_initial(sample, eta):
    """Initial state off the reference: attitude by a right-multiplied
    rotation exponential, position and velocity by offsets."""
    R0 = sample.state.R @ kernels.so3_exp(np.ascontiguousarray(eta[0:3]))
    return QuadState(R0, sample.state.x + eta[3:6], sample.state.v + eta[6:9])


def control_step(tag, sample, state, K):
    """Feedback through the symmetry's error chart.

    Returns (input, eps).  Raises lie.ChartError when the attitude error
    reaches the chart boundary; callers treat that as divergence.
    """
    if tag is SymmetryTag.POSE_VELOCITY:
        E = quad.equivariant_error(tag, quad.body_view(sample.state), quad.body_view(state))
    else:
        E = quad.equivariant_error(tag, sample.state, state)
    eps = lie.group_log(E)
    ut = -(K @ eps)
    u = ControlInput(sample.u.omega + ut[0:3], sample.u.thrust + float(ut[3]))
    return u, eps


def integrate_step(state, u, noise, dt, params):
    """One geometric integration step.

    The attitude advances along the rotation exponential of the (noisy)
    commanded rates.  Position and velocity take an RK4 step with the body
    thrust axis read off that same in-step rotation at the stage times, and
    the noise entering as additive rates.
    """
    om = u.omega + noise[0:3]
    nx = noise[3:6]
    nv = noise[6:9]
    c1 = params.c1
    g3 = params.gravity * E3
    Rh = state.R @ kernels.so3_exp(0.5 * dt * om)
    Rf = state.R @ kernels.so3_exp(dt * om)
    a1 = -u.thrust * (state.R @ E3) + g3
    a2 = -u.thrust * (Rh @ E3) + g3
    a4 = -u.thrust * (Rf @ E3) + g3
    v = state.v
    k1x = v + nx
    k1v = a1 - c1 * v + nv
    v2 = v + 0.5 * dt * k1v
    k2x = v2 + nx
    k2v = a2 - c1 * v2 + nv
    v3 = v + 0.5 * dt * k2v
    k3x = v3 + nx
    k3v = a2 - c1 * v3 + nv
    v4 = v + dt * k3v
    k4x = v4 + nx
    k4v = a4 - c1 * v4 + nv
    x_next = state.x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    v_next = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return QuadState(kernels.orthonormalize(Rf), x_next, v_next)


def make_trajectory(cfg):
    flat = TRAJECTORIES[cfg.trajectory]()
    return trajgen.sample_trajectory(flat, cfg.duration, cfg.dt, cfg.phys)


def prepare_context(cfg, tag, traj=None):
    """Reference sampling plus the gain schedule for one symmetry."""
    if traj is None:
        traj = make_trajectory(cfg)
    gains = lqr.schedule_gains(tag, traj, cfg.weights, cfg.phys, cfg.dt)
    return TrialContext(cfg, tag, traj, gains)


def run_trial(cfg, tag, trial, context=None):
    """One perturbed closed-loop trial.  Deterministic in (cfg, tag, trial)."""
    ctx = context if context is not None else prepare_context(cfg, tag)
    traj = ctx.traj
    n_steps = len(traj) - 1
    eta, noise, fingerprint = draw_trial_streams(cfg, trial, n_steps)
    state0 = perturb_initial(traj.sample(0), eta)
    records, diverged, n_valid, max_defect = kernels.trial_loop(
        tag.code,
        traj.R,
        traj.x,
        traj.v,
        traj.vb,
        traj.omega,
        traj.tbar,
        ctx.gains.K,
        np.ascontiguousarray(state0.R),
        np.ascontiguousarray(state0.x),
        np.ascontiguousarray(state0.v),
        noise,
        cfg.dt,
        cfg.phys.gravity,
        cfg.phys.c1,
        cfg.clamp_thrust,
    )
    return TrialLog(
        symmetry=tag,
        trial=trial,
        times=traj.times[:n_valid].copy(),
        records=records[:n_valid].copy(),
        diverged=bool(diverged),
        n_valid=int(n_valid),
        max_defect=float(max_defect),
        stream_fingerprint=fingerprint,
    )


def _campaign_one(cfg, tag, traj):
    ctx = prepare_context(cfg, tag, traj)
    logs = [None] * cfg.trials
    # first trial serially: warms compiled kernels before the pool fans out
    logs[0] = run_trial(cfg, tag, 0, ctx)
    rest = range(1, cfg.trials)
    workers = min(thread_count(), max(1, cfg.trials - 1))
    if workers > 1 and cfg.trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, lg in zip(rest, pool.map(lambda i: run_trial(cfg, tag, i, ctx), rest)):
                logs[i] = lg
    else:
        for i in rest:
            logs[i] = run_trial(cfg, tag, i, ctx)
    return logs


def run_campaign(cfg):
    """Run every configured symmetry over paired trials and aggregate."""
    traj = make_trajectory(cfg)
    n_rec = len(traj)
    band = {}
    valid_counts = {}
    rmse = {}
    rmse_percentiles = {}
    diverged = {}
    all_logs = {}
    for tag in cfg.symmetries:
        logs = _campaign_one(cfg, tag, traj)
        err = np.full((cfg.trials, n_rec), np.nan)
        r = np.empty(cfg.trials)
        for i, lg in enumerate(logs):
            err[i, : lg.n_valid] = lg.records[:, 3]
            r[i] = math.sqrt(float(np.mean(lg.records[:, 3]))) if lg.n_valid else np.nan
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            band[tag] = np.nanpercentile(err, [5.0, 50.0, 95.0], axis=0)
            rmse_percentiles[tag] = tuple(
                float(p) for p in np.nanpercentile(r, [20.0, 50.0, 80.0])
            )
        valid_counts[tag] = np.sum(~np.isnan(err), axis=0)
        rmse[tag] = r
        diverged[tag] = sum(1 for lg in logs if lg.diverged)
        all_logs[tag] = logs
    return CampaignSummary(
        config=cfg,
        times=traj.times.copy(),
        band=band,
        valid_counts=valid_counts,
        rmse=rmse,
        rmse_percentiles=rmse_percentiles,
        diverged=diverged,
        logs=all_logs,
    )
