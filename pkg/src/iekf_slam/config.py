"""Flat `key = value` run configuration with dotted section keys.

Lines are `key = value`, `#` starts a comment, blank lines are ignored.
Unknown keys are rejected with the offending key and line number.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .icp import IcpConfig
from .iekf import FilterState, NoiseConfig
from .se3 import Pose
from .simulator import SensorRates, TrajectorySpec, WorldModel, corridor_world, default_world

KNOWN_KEYS = {
    "seed",
    "mode",
    "scenario.kind",
    "scenario.speed",
    "scenario.duration",
    "scenario.length",
    "scenario.radius",
    "scenario.turns",
    "scenario.veer_rate",
    "scenario.waypoints",
    "world.kind",
    "world.corridor_spacing",
    "world.corridor_half_width",
    "world.corridor_length",
    "world.corridor_height",
    "rates.odometry_hz",
    "rates.scan_hz",
    "rates.cloud_sigma",
    "rates.range_max",
    "rates.fov",
    "noise.gyro_sigma",
    "noise.velocity_sigma",
    "filter.init_x",
    "filter.init_y",
    "filter.init_heading_deg",
    "filter.p0_rot",
    "filter.p0_pos",
    "icp.max_iterations",
    "icp.convergence_tol",
    "icp.max_correspondence_dist",
    "icp.min_points",
    "icp.sigma",
}


def parse_config(path) -> dict:
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    values = {}
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in KNOWN_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def _get(cfg, key, default, convert):
    raw = cfg.get(key)
    if raw is None:
        return default
    try:
        return convert(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def get_float(cfg, key, default=None):
    return _get(cfg, key, default, float)


def get_int(cfg, key, default=None):
    return _get(cfg, key, default, int)


def make_world(cfg) -> WorldModel:
    kind = cfg.get("world.kind", "default")
    if kind == "default":
        return default_world()
    if kind == "corridor":
        return corridor_world(
            length=get_float(cfg, "world.corridor_length", 30.0),
            half_width=get_float(cfg, "world.corridor_half_width", 1.0),
            spacing=get_float(cfg, "world.corridor_spacing", 0.05),
            height=get_float(cfg, "world.corridor_height", 0.4),
        )
    raise ConfigError(f"unknown world.kind {kind!r}")


def make_spec(cfg) -> TrajectorySpec:
    waypoints = ()
    raw = cfg.get("scenario.waypoints")
    if raw:
        try:
            waypoints = tuple(
                tuple(float(v) for v in part.split()) for part in raw.split(";") if part.strip()
            )
        except ValueError as exc:
            raise ConfigError(f"bad scenario.waypoints: {raw!r}") from exc
    return TrajectorySpec(
        kind=cfg.get("scenario.kind", "straight"),
        speed=get_float(cfg, "scenario.speed", 0.25),
        duration=get_float(cfg, "scenario.duration", None),
        length=get_float(cfg, "scenario.length", 8.0),
        radius=get_float(cfg, "scenario.radius", 1.5),
        turns=get_float(cfg, "scenario.turns", 2.0),
        veer_rate=get_float(cfg, "scenario.veer_rate", 0.0),
        waypoints=waypoints,
    )


def make_rates(cfg) -> SensorRates:
    return SensorRates(
        odometry_hz=get_float(cfg, "rates.odometry_hz", 50.0),
        scan_hz=get_float(cfg, "rates.scan_hz", 5.0),
        cloud_sigma=get_float(cfg, "rates.cloud_sigma", 0.05),
        range_max=get_float(cfg, "rates.range_max", 12.0),
        fov=get_float(cfg, "rates.fov", 2.0 * np.pi),
    )


def make_noise(cfg) -> NoiseConfig:
    return NoiseConfig.from_sigmas(
        gyro_sigma=get_float(cfg, "noise.gyro_sigma", 0.01),
        velocity_sigma=get_float(cfg, "noise.velocity_sigma", 0.02),
    )


def make_icp_config(cfg, sigma=None) -> IcpConfig:
    return IcpConfig(
        max_iterations=get_int(cfg, "icp.max_iterations", 50),
        convergence_tol=get_float(cfg, "icp.convergence_tol", 1e-6),
        max_correspondence_dist=get_float(cfg, "icp.max_correspondence_dist", 0.5),
        min_points=get_int(cfg, "icp.min_points", 10),
        sigma=get_float(cfg, "icp.sigma", sigma if sigma is not None else 0.05),
    )


def make_initial_state(cfg, timestamp=0.0) -> FilterState:
    psi = np.radians(get_float(cfg, "filter.init_heading_deg", 0.0))
    c, s = np.cos(psi), np.sin(psi)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    pose = Pose(rot, np.array([
        get_float(cfg, "filter.init_x", 0.0),
        get_float(cfg, "filter.init_y", 0.0),
        0.0,
    ]))
    return FilterState.initial(
        pose=pose,
        rot_var=get_float(cfg, "filter.p0_rot", 1e-4),
        pos_var=get_float(cfg, "filter.p0_pos", 1e-4),
        timestamp=timestamp,
    )
