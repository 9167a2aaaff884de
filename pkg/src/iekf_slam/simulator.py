"""Synthetic world, trajectory and sensor models for regenerating the
library's validation experiments: a landmark/wall scene, planar reference
trajectories integrated exactly on SE(3), additive-noise odometry and
noisy body-frame scans, all driven by a single seeded generator.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .iekf import NoiseConfig, OdometrySample
from .pointcloud import BODY, PointCloud
from .se3 import Pose, exp_se3, log_se3


@dataclass(frozen=True)
class WallSegment:
    """Vertical wall sampled into a point grid anchored at ``start``.

    Grid spacing is ``spacing`` along the segment and ``z_spacing`` in height.
    """

    start: np.ndarray  # (2,) ground x, y
    end: np.ndarray  # (2,)
    height: float = 1.0
    spacing: float = 0.25
    z_spacing: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "start", np.asarray(self.start, dtype=float))
        object.__setattr__(self, "end", np.asarray(self.end, dtype=float))

    def sample(self):
        delta = self.end - self.start
        length = float(np.linalg.norm(delta))
        direction = delta / length
        n_s = int(np.floor(length / self.spacing + 1e-9)) + 1
        n_z = int(np.floor(self.height / self.z_spacing + 1e-9)) + 1
        offsets = self.spacing * np.arange(n_s)
        heights = self.z_spacing * np.arange(n_z)
        xy = self.start[None, :] + offsets[:, None] * direction[None, :]
        pts = np.empty((n_s * n_z, 3))
        pts[:, :2] = np.repeat(xy, n_z, axis=0)
        pts[:, 2] = np.tile(heights, n_s)
        return pts


@dataclass(frozen=True)
class WorldModel:
    """Ground-frame scene: discrete landmarks plus sampled wall segments."""

    landmarks: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    walls: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "landmarks", np.asarray(self.landmarks, dtype=float).reshape(-1, 3)
        )
        object.__setattr__(self, "walls", tuple(self.walls))

    def sampled_points(self):
        """All world points in a stable order: landmarks first, walls in order."""
        parts = [self.landmarks] + [w.sample() for w in self.walls]
        pts = np.concatenate(parts, axis=0)
        if pts.shape[0] < 1:
            raise ValueError("world has no points after sampling")
        if not np.all(np.isfinite(pts)):
            raise ValueError("world contains non-finite coordinates")
        return pts

    def digest(self):
        return hashlib.sha256(np.ascontiguousarray(self.sampled_points()).tobytes()).hexdigest()[:16]


def default_world() -> WorldModel:
    """Rectangular room (x in [-3, 9], y in [-4, 4]) with 40 perimeter
    landmarks at varied heights plus 10 interior landmarks."""
    corners = np.array([[-3.0, -4.0], [9.0, -4.0], [9.0, 4.0], [-3.0, 4.0]])
    sides = np.roll(corners, -1, axis=0) - corners
    side_len = np.linalg.norm(sides, axis=1)
    perimeter = side_len.sum()  # 40 m
    points = []
    for k in range(40):
        s = perimeter * k / 40.0
        j = 0
        while s > side_len[j]:
            s -= side_len[j]
            j += 1
        xy = corners[j] + sides[j] * (s / side_len[j])
        z = 0.2 + 1.3 * ((7 * k) % 10) / 9.0
        points.append([xy[0], xy[1], z])
    interior = [
        [1.5, 1.8, 0.5],
        [3.0, -2.0, 1.1],
        [4.5, 2.2, 0.8],
        [6.0, -1.5, 0.4],
        [7.5, 1.0, 1.3],
        [2.0, -0.8, 0.9],
        [5.2, 0.9, 1.4],
        [0.5, -2.3, 0.7],
        [8.2, -2.4, 1.0],
        [6.8, 2.5, 0.6],
    ]
    return WorldModel(np.array(points + interior))


def corridor_world(length=30.0, half_width=1.0, spacing=0.05, height=0.4, z_spacing=0.2) -> WorldModel:
    """Long featureless corridor along +x: two parallel walls on a uniform
    grid, so scans taken a whole number of grid steps apart are identical."""
    walls = (
        WallSegment([-5.0, -half_width], [length - 5.0, -half_width], height, spacing, z_spacing),
        WallSegment([-5.0, half_width], [length - 5.0, half_width], height, spacing, z_spacing),
    )
    return WorldModel(np.zeros((0, 3)), walls)


@dataclass(frozen=True)
class TrajectorySpec:
    """Planar reference motion; z = 0, roll = pitch = 0 throughout."""

    kind: str = "straight"  # straight | circle | waypoints
    speed: float = 0.25  # m/s
    duration: float | None = None  # s; derived from geometry when None
    length: float = 8.0  # m, straight
    radius: float = 1.5  # m, circle
    turns: float = 2.0  # circle revolutions
    veer_rate: float = 0.0  # rad/s, optional drift of the straight run
    waypoints: tuple = ()  # sequence of (x, y), waypoints kind

    def __post_init__(self):
        if self.speed <= 0:
            raise ConfigError("scenario speed must be positive")
        if self.kind not in ("straight", "circle", "waypoints"):
            raise ConfigError(f"unknown trajectory kind {self.kind!r}")

    def resolved_duration(self):
        if self.duration is not None:
            if self.duration <= 0:
                raise ConfigError("scenario duration must be positive")
            return float(self.duration)
        if self.kind == "straight":
            return self.length / self.speed
        if self.kind == "circle":
            return self.turns * 2.0 * np.pi * self.radius / self.speed
        pts = np.asarray(self.waypoints, dtype=float).reshape(-1, 2)
        if pts.shape[0] < 1:
            raise ConfigError("waypoints trajectory needs at least one waypoint")
        path = np.vstack([[0.0, 0.0], pts])
        return float(np.linalg.norm(np.diff(path, axis=0), axis=1).sum()) / self.speed


@dataclass(frozen=True)
class SensorRates:
    odometry_hz: float = 50.0
    scan_hz: float = 5.0
    cloud_sigma: float = 0.05  # m
    range_max: float = 12.0  # m
    fov: float = 2.0 * np.pi  # rad, horizontal

    def __post_init__(self):
        if not self.odometry_hz >= self.scan_hz > 0:
            raise ConfigError("need odometry_hz >= scan_hz > 0")
        if self.cloud_sigma < 0:
            raise ConfigError("cloud_sigma must be >= 0")
        ratio = self.odometry_hz / self.scan_hz
        if abs(ratio - round(ratio)) > 1e-9:
            raise ConfigError("odometry_hz must be an integer multiple of scan_hz")

    def scan_stride(self):
        return int(round(self.odometry_hz / self.scan_hz))


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    pose: Pose
    twist: np.ndarray  # (6,) body twist applied over [t, t + dt]


def _waypoint_pose(path, cum_len, distance):
    distance = min(distance, cum_len[-1])
    j = int(np.searchsorted(cum_len[1:], distance, side="right"))
    j = min(j, len(path) - 2)
    seg = path[j + 1] - path[j]
    seg_len = np.linalg.norm(seg)
    frac = (distance - cum_len[j]) / seg_len
    xy = path[j] + frac * seg
    psi = np.arctan2(seg[1], seg[0])
    c, s = np.cos(psi), np.sin(psi)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return Pose(rot, np.array([xy[0], xy[1], 0.0]))


def generate_trajectory(spec: TrajectorySpec, dt: float):
    """Ground-truth stream satisfying X_{k+1} = X_k * exp(dt * twist_k) exactly.

    Returns n + 1 TrajectoryPoints for a duration of n * dt; the final entry
    repeats the last twist (it covers no interval).
    """
    duration = spec.resolved_duration()
    n = int(round(duration / dt))
    if spec.kind in ("straight", "circle"):
        omega_z = spec.veer_rate if spec.kind == "straight" else spec.speed / spec.radius
        twist = np.array([0.0, 0.0, omega_z, spec.speed, 0.0, 0.0])
        twists = [twist] * (n + 1)
        step = exp_se3(dt * twist)
        poses = [Pose.identity()]
        for _ in range(n):
            poses.append(poses[-1] @ step)
    else:
        path = np.vstack([[0.0, 0.0], np.asarray(spec.waypoints, dtype=float).reshape(-1, 2)])
        cum_len = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(path, axis=0), axis=1))])
        poses = [Pose.identity() if np.allclose(path[0], 0.0) else _waypoint_pose(path, cum_len, 0.0)]
        poses[0] = _waypoint_pose(path, cum_len, 0.0)
        twists = []
        for k in range(n):
            desired = _waypoint_pose(path, cum_len, spec.speed * (k + 1) * dt)
            twist = log_se3(poses[-1].inverse() @ desired) / dt
            twists.append(twist)
            poses.append(poses[-1] @ exp_se3(dt * twist))
        twists.append(twists[-1] if twists else np.zeros(6))
    return [TrajectoryPoint(k * dt, poses[k], twists[k]) for k in range(n + 1)]


def _cov_sqrt(cov):
    vals, vecs = np.linalg.eigh(cov)
    vals = np.clip(vals, 0.0, None)
    return vecs @ np.diag(np.sqrt(vals)) @ vecs.T


def sample_odometry(twist, noise: NoiseConfig, rng, timestamp=0.0) -> OdometrySample:
    """Additive Gaussian noise on the true body twist; exact when covariances are zero."""
    twist = np.asarray(twist, dtype=float)
    nu_omega = _cov_sqrt(noise.gyro_cov) @ rng.standard_normal(3)
    nu_mu = _cov_sqrt(noise.velocity_cov) @ rng.standard_normal(3)
    return OdometrySample(twist[:3] + nu_omega, twist[3:] + nu_mu, timestamp)


def render_scan(world: WorldModel, true_pose: Pose, rates: SensorRates, rng, timestamp=0.0):
    """Body-frame scan of the world points within range and horizontal fov.

    Points keep world index order; each is perturbed by isotropic Gaussian
    noise of cloud_sigma. Returns None when nothing is visible.
    """
    body = true_pose.inverse().apply(world.sampled_points())
    visible = np.linalg.norm(body, axis=1) <= rates.range_max
    if rates.fov < 2.0 * np.pi:
        bearing = np.abs(np.arctan2(body[:, 1], body[:, 0]))
        visible &= bearing <= rates.fov / 2.0
    body = body[visible]
    if body.shape[0] == 0:
        return None
    if rates.cloud_sigma > 0:
        body = body + rates.cloud_sigma * rng.standard_normal(body.shape)
    return PointCloud(body, BODY, timestamp)


@dataclass
class ScenarioLog:
    """Immutable record of one simulated run; replay-deterministic per seed."""

    ground_truth: list  # of (t, Pose)
    odometry: list  # of OdometrySample
    scans: list  # of PointCloud, body frame
    seed: int
    meta: dict = field(default_factory=dict)


def run_scenario(
    world: WorldModel,
    spec: TrajectorySpec,
    rates: SensorRates,
    noise: NoiseConfig,
    seed: int,
) -> ScenarioLog:
    """Generate ground truth at the odometry rate, noisy odometry for every
    interval, and scans every odometry_hz/scan_hz steps starting at t = 0."""
    rng = np.random.default_rng(seed)
    dt = 1.0 / rates.odometry_hz
    traj = generate_trajectory(spec, dt)
    stride = rates.scan_stride()
    odometry = []
    scans = []
    for k, point in enumerate(traj[:-1]):
        odometry.append(sample_odometry(point.twist, noise, rng, point.t))
        if k % stride == 0:
            scan = render_scan(world, point.pose, rates, rng, point.t)
            if scan is not None:
                scans.append(scan)
    meta = {
        "seed": str(seed),
        "odometry_hz": repr(float(rates.odometry_hz)),
        "scan_hz": repr(float(rates.scan_hz)),
        "cloud_sigma": repr(float(rates.cloud_sigma)),
        "range_max": repr(float(rates.range_max)),
        "fov": repr(float(rates.fov)),
        "gyro_cov_diag": " ".join(repr(float(v)) for v in np.diag(noise.gyro_cov)),
        "velocity_cov_diag": " ".join(repr(float(v)) for v in np.diag(noise.velocity_cov)),
        "world_points": str(world.sampled_points().shape[0]),
        "world_hash": world.digest(),
        "scenario_kind": spec.kind,
    }
    return ScenarioLog(
        ground_truth=[(p.t, p.pose) for p in traj],
        odometry=odometry,
        scans=scans,
        seed=seed,
        meta=meta,
    )
