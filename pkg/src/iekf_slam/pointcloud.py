"""Point-cloud container, frame bookkeeping and the line-oriented .xyz format."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError
from .se3 import Pose

BODY = "body"
GROUND = "ground"
_FRAMES = (BODY, GROUND)


@dataclass(frozen=True)
class PointCloud:
    """Ordered set of 3-D points (meters) with a frame tag and timestamp.

    Point order is stable: index i is an identity for correspondence purposes.
    """

    points: np.ndarray
    frame: str = BODY
    timestamp: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud contains non-finite coordinates")
        if self.frame not in _FRAMES:
            raise ValueError(f"unknown frame tag {self.frame!r}")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    def transformed(self, pose: Pose, frame: str | None = None) -> "PointCloud":
        """Apply a rigid transform to every point, flipping the frame tag.

        A body-frame cloud transformed by the vehicle pose lands in the ground
        frame and vice versa; pass ``frame`` to override.
        """
        if frame is None:
            frame = GROUND if self.frame == BODY else BODY
        return PointCloud(pose.apply(self.points), frame, self.timestamp)


def transform_cloud(pose: Pose, cloud: PointCloud) -> PointCloud:
    return cloud.transformed(pose)


def save_xyz(cloud: PointCloud, path):
    with open(path, "w") as fh:
        for x, y, z in cloud.points:
            fh.write(f"{float(x)!r} {float(y)!r} {float(z)!r}\n")


def load_xyz(path, frame=BODY, timestamp=0.0) -> PointCloud:
    """Read a cloud from text: one `x y z` per line, `#` comments, blanks ok."""
    points = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 values, got {len(parts)}")
            try:
                points.append([float(p) for p in parts])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return PointCloud(np.array(points).reshape(-1, 3), frame, timestamp)
