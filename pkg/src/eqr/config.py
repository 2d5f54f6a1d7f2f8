"""Run configuration: JSON parsing, validation and defaults.

Unknown keys are rejected with their full path so a typo in a config file
fails loudly instead of silently running the defaults.
"""

import json
import math

from .lie import SymmetryTag
from .lqr import LqrWeights
from .quad import PhysParams
from .sim import ALL_SYMMETRIES, SimConfig


class ConfigError(ValueError):
    pass


_SYMMETRY_BY_NAME = {t.value: t for t in SymmetryTag}


def _require_mapping(obj, path):
    if not isinstance(obj, dict):
        raise ConfigError("config: %s must be an object" % path)
    return obj


def _check_keys(d, allowed, path):
    for key in d:
        if key not in allowed:
            where = "%s.%s" % (path, key) if path else key
            raise ConfigError("config: unknown key '%s'" % where)


def _number(d, key, default, path, integer=False):
    if key not in d:
        return default
    val = d[key]
    where = "%s.%s" % (path, key) if path else key
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError("config: '%s' must be a number" % where)
    if integer:
        if int(val) != val:
            raise ConfigError("config: '%s' must be an integer" % where)
        return int(val)
    return float(val)


def _symmetries(d):
    if "symmetries" not in d:
        return ALL_SYMMETRIES
    raw = d["symmetries"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("config: 'symmetries' must be a non-empty list")
    tags = []
    for name in raw:
        if name not in _SYMMETRY_BY_NAME:
            raise ConfigError(
                "config: unknown symmetry %r (choose from %s)"
                % (name, ", ".join(sorted(_SYMMETRY_BY_NAME)))
            )
        tag = _SYMMETRY_BY_NAME[name]
        if tag in tags:
            raise ConfigError("config: symmetry %r listed twice" % name)
        tags.append(tag)
    return tuple(tags)


def config_from_dict(data):
    """Build a validated SimConfig from a plain dict (parsed JSON)."""
    _require_mapping(data, "top level")
    _check_keys(
        data,
        {
            "dt",
            "duration",
            "trajectory",
            "symmetries",
            "trials",
            "seed",
            "init_std",
            "process_std",
            "lqr",
            "phys",
            "clamp_thrust",
        },
        "",
    )
    init = _require_mapping(data.get("init_std", {}), "init_std")
    _check_keys(init, {"rot", "pos", "vel"}, "init_std")
    weights = _require_mapping(data.get("lqr", {}), "lqr")
    _check_keys(weights, {"q_r", "q_x", "q_v", "r_omega", "r_thrust"}, "lqr")
    phys = _require_mapping(data.get("phys", {}), "phys")
    _check_keys(phys, {"mass", "gravity", "c1"}, "phys")

    trajectory = data.get("trajectory", "hover")
    if not isinstance(trajectory, str):
        raise ConfigError("config: 'trajectory' must be a string")
    clamp = data.get("clamp_thrust", False)
    if not isinstance(clamp, bool):
        raise ConfigError("config: 'clamp_thrust' must be a boolean")

    try:
        return SimConfig(
            dt=_number(data, "dt", 0.01, ""),
            duration=_number(data, "duration", math.pi, ""),
            trajectory=trajectory,
            symmetries=_symmetries(data),
            trials=_number(data, "trials", 200, "", integer=True),
            seed=_number(data, "seed", 0, "", integer=True),
            init_std=(
                _number(init, "rot", 0.8, "init_std"),
                _number(init, "pos", 0.6, "init_std"),
                _number(init, "vel", 0.3, "init_std"),
            ),
            process_std=_number(data, "process_std", 0.1, ""),
            weights=LqrWeights(
                q_r=_number(weights, "q_r", 1.0, "lqr"),
                q_x=_number(weights, "q_x", 2.0, "lqr"),
                q_v=_number(weights, "q_v", 0.1, "lqr"),
                r_omega=_number(weights, "r_omega", 0.5, "lqr"),
                r_thrust=_number(weights, "r_thrust", 0.5, "lqr"),
            ),
            phys=PhysParams(
                mass=_number(phys, "mass", 1.0, "phys"),
                gravity=_number(phys, "gravity", 9.81, "phys"),
                c1=_number(phys, "c1", 0.25, "phys"),
            ),
            clamp_thrust=clamp,
        )
    except ValueError as exc:
        raise ConfigError("config: %s" % exc) from exc


def parse_config(path):
    """Load and validate a JSON config file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config: %s is not valid JSON (%s)" % (path, exc)) from exc
    return config_from_dict(data)


def config_to_dict(cfg):
    """Canonical dict form; config_from_dict of the result is the identity."""
    return {
        "dt": cfg.dt,
        "duration": cfg.duration,
        "trajectory": cfg.trajectory,
        "symmetries": [t.value for t in cfg.symmetries],
        "trials": cfg.trials,
        "seed": cfg.seed,
        "init_std": {
            "rot": cfg.init_std[0],
            "pos": cfg.init_std[1],
            "vel": cfg.init_std[2],
        },
        "process_std": cfg.process_std,
        "lqr": {
            "q_r": cfg.weights.q_r,
            "q_x": cfg.weights.q_x,
            "q_v": cfg.weights.q_v,
            "r_omega": cfg.weights.r_omega,
            "r_thrust": cfg.weights.r_thrust,
        },
        "phys": {
            "mass": cfg.phys.mass,
            "gravity": cfg.phys.gravity,
            "c1": cfg.phys.c1,
        },
        "clamp_thrust": cfg.clamp_thrust,
    }
