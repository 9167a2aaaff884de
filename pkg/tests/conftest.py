import numpy as np
import pytest

from iekf_slam.se3 import Pose, hat


def series_exp(twist, terms=20):
    """Truncated matrix-power series oracle for the se(3) exponential."""
    xi = hat(twist)
    out = np.eye(4)
    term = np.eye(4)
    for k in range(1, terms + 1):
        term = term @ xi / k
        out = out + term
    return Pose(out[:3, :3], out[:3, 3])


def random_twist(rng, rot_scale=1.0, trans_scale=1.0):
    return np.concatenate(
        [rot_scale * rng.uniform(-1, 1, 3), trans_scale * rng.uniform(-1, 1, 3)]
    )


def random_pose(rng, rot_scale=1.0, trans_scale=1.0):
    from iekf_slam.se3 import exp_se3

    return exp_se3(random_twist(rng, rot_scale, trans_scale))


def rot_z(psi):
    c, s = np.cos(psi), np.sin(psi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
