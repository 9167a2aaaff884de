"""Left-invariant EKF on SE(3).

The linearization of the invariant error dynamics depends only on the
measured body-frame velocities, never on the estimated pose:

    A = [[-S(omega), 0], [-S(mu), -S(omega)]],  B = -I,  C = I,  D = I

Covariance propagates by an Euler step of the Riccati drift between scans;
each pose measurement applies the equivalent discrete update with gain
K = P (P + C_meas)^-1 and the multiplicative correction pose * exp(K z),
z = vee(pi(pose^-1 * measured)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MeasurementRejectedError, NumericalFailureError, TimingError
from .scan_matching import PoseMeasurement
from .se3 import Pose, exp_se3, project_pi, skew

MAX_PREDICT_SUBSTEP = 0.1  # s


@dataclass(frozen=True)
class OdometrySample:
    """Body-frame angular (rad/s) and linear (m/s) velocity at one instant."""

    omega: np.ndarray
    mu: np.ndarray
    timestamp: float

    def __post_init__(self):
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))

    def twist(self):
        return np.concatenate([self.omega, self.mu])


@dataclass(frozen=True)
class NoiseConfig:
    """Process noise covariances of the additive body-frame sensor noise."""

    gyro_cov: np.ndarray = field(default_factory=lambda: (0.01**2) * np.eye(3))
    velocity_cov: np.ndarray = field(default_factory=lambda: (0.02**2) * np.eye(3))

    def __post_init__(self):
        object.__setattr__(self, "gyro_cov", np.asarray(self.gyro_cov, dtype=float))
        object.__setattr__(self, "velocity_cov", np.asarray(self.velocity_cov, dtype=float))

    @staticmethod
    def from_sigmas(gyro_sigma=0.01, velocity_sigma=0.02):
        return NoiseConfig(gyro_sigma**2 * np.eye(3), velocity_sigma**2 * np.eye(3))

    def q_block(self):
        """6x6 block-diagonal process covariance (B = -I makes B Q B^T = Q)."""
        q = np.zeros((6, 6))
        q[:3, :3] = self.gyro_cov
        q[3:, 3:] = self.velocity_cov
        return q


@dataclass(frozen=True)
class LinearizedMatrices:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray


@dataclass(frozen=True)
class FilterState:
    pose: Pose
    covariance: np.ndarray  # 6x6 symmetric PD
    timestamp: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "covariance", np.asarray(self.covariance, dtype=float))

    @staticmethod
    def initial(pose=None, rot_var=1e-4, pos_var=1e-4, timestamp=0.0):
        p0 = np.diag([rot_var] * 3 + [pos_var] * 3)
        return FilterState(pose if pose is not None else Pose.identity(), p0, timestamp)


def linearize(sample: OdometrySample) -> LinearizedMatrices:
    """State-independent linearization: a function of the odometry sample alone."""
    a = np.zeros((6, 6))
    a[:3, :3] = -skew(sample.omega)
    a[3:, :3] = -skew(sample.mu)
    a[3:, 3:] = -skew(sample.omega)
    return LinearizedMatrices(A=a, B=-np.eye(6), C=np.eye(6), D=np.eye(6))


def _require_pd(p, context):
    try:
        np.linalg.cholesky(p)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"covariance not positive definite after {context}") from exc


def predict(state: FilterState, sample: OdometrySample, dt: float, noise: NoiseConfig) -> FilterState:
    """Propagate pose exactly (constant twist over dt) and P by first-order
    steps of the Riccati drift, substepping so no step exceeds 0.1 s.

    Each substep applies (I + hA) P (I + hA)^T + hQ: the Euler step of
    dP = (AP + PA^T + Q) dt plus the h^2 A P A^T completion, which keeps P
    positive definite even for very lopsided priors."""
    if dt <= 0:
        raise TimingError(f"non-positive prediction step dt={dt}")
    a = linearize(sample).A
    q = noise.q_block()
    p = state.covariance
    n_sub = max(1, math.ceil(dt / MAX_PREDICT_SUBSTEP))
    h = dt / n_sub
    phi = np.eye(6) + h * a
    for _ in range(n_sub):
        p = phi @ p @ phi.T + h * q
        p = (p + p.T) / 2.0
    pose = state.pose @ exp_se3(dt * sample.twist())
    _require_pd(p, "predict")
    return FilterState(pose, p, state.timestamp + dt)


def innovation(state: FilterState, meas: PoseMeasurement):
    """Twist-valued innovation vee(pi(pose^-1 * measured)); left-invariant."""
    return project_pi(state.pose.inverse() @ meas.measured_pose)


def update(state: FilterState, meas: PoseMeasurement) -> FilterState:
    """Discrete measurement update with C = D = I: K = P (P + C_meas)^-1,
    multiplicative correction through exp, Joseph-form covariance update."""
    p = state.covariance
    s = p + meas.covariance
    try:
        gain = np.linalg.solve(s.T, p.T).T
    except np.linalg.LinAlgError as exc:
        raise MeasurementRejectedError("singular innovation covariance") from exc
    if not np.all(np.isfinite(gain)):
        raise MeasurementRejectedError("non-finite Kalman gain")
    z = innovation(state, meas)
    pose = state.pose @ exp_se3(gain @ z)
    i_k = np.eye(6) - gain
    p_new = i_k @ p @ i_k.T + gain @ meas.covariance @ gain.T
    p_new = (p_new + p_new.T) / 2.0
    _require_pd(p_new, "update")
    return FilterState(pose, p_new, state.timestamp)


def run_filter(odometry, measurements, noise: NoiseConfig, init: FilterState):
    """Merge timestamp-sorted odometry and measurement streams through
    predict/update; yields the filter state after every event.

    Velocity samples are zero-order held: the sample at t_k propagates the
    state up to the next event. Equal timestamps process odometry first.
    A failed update (rejected measurement) leaves the state on prediction.
    """
    state = init
    last_sample = None
    odo_iter = iter(odometry)
    meas_iter = iter(measurements)
    odo = next(odo_iter, None)
    meas = next(meas_iter, None)
    prev_t = -np.inf
    while odo is not None or meas is not None:
        take_odo = meas is None or (odo is not None and odo.timestamp <= meas.timestamp)
        t = odo.timestamp if take_odo else meas.timestamp
        if t < prev_t:
            raise TimingError(f"out-of-order timestamp {t} after {prev_t}")
        prev_t = t
        if t > state.timestamp:
            if last_sample is not None:
                state = predict(state, last_sample, t - state.timestamp, noise)
            else:
                state = FilterState(state.pose, state.covariance, t)
        if take_odo:
            last_sample = odo
            odo = next(odo_iter, None)
        else:
            try:
                state = update(state, meas)
            except MeasurementRejectedError:
                pass
            meas = next(meas_iter, None)
        yield state
