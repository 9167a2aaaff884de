"""Invariant-EKF scan-matching SLAM on SE(3).

Library layout:

- ``se3``: Lie-group primitives (hat/vee, exp, log, projection, renormalize)
- ``pointcloud`` / ``icp``: clouds, ICP alignment and its covariance model
- ``scan_matching``: naive and odometry-aided matching pipelines
- ``iekf``: the left-invariant Kalman filter
- ``simulator`` / ``logio``: synthetic scenarios and their on-disk format
- ``pipeline`` / ``metrics`` / ``cli``: replay modes, RMS scoring, CLI harness
- ``kernels``: compiled correspondence search with a pure-numpy fallback
"""

from .icp import IcpConfig, IcpResult, icp_align, icp_covariance, nearest_neighbor, solve_linear_alignment
from .iekf import FilterState, LinearizedMatrices, NoiseConfig, OdometrySample, linearize, predict, run_filter, update
from .kernels import BACKEND as KERNEL_BACKEND
from .pointcloud import PointCloud, transform_cloud
from .scan_matching import MatcherState, PoseMeasurement, aided_step, naive_step
from .se3 import Pose, exp_se3, hat, log_se3, planar_extract, project_pi, renormalize, skew, vee
from .simulator import ScenarioLog, SensorRates, TrajectorySpec, WorldModel, run_scenario

__version__ = "0.1.0"
