"""On-disk formats: scenario log directories, trajectory CSVs and estimate CSVs.

All floats are written with repr (shortest round-trip decimal), so a dump and
its reload are bit-identical and repeated runs of a seeded pipeline produce
byte-identical files.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ParseError
from .iekf import OdometrySample
from .pointcloud import BODY, PointCloud, load_xyz, save_xyz
from .se3 import Pose, planar_extract
from .simulator import ScenarioLog

GROUND_TRUTH_HEADER = "t,r00,r01,r02,r10,r11,r12,r20,r21,r22,x,y,z"
ODOMETRY_HEADER = "t,wx,wy,wz,vx,vy,vz"
ESTIMATES_HEADER = "t,x,y,z,psi," + ",".join(f"P{i}{j}" for i in range(6) for j in range(6))


def _fmt(values):
    return ",".join(repr(float(v)) for v in values)


def _read_csv(path, header, n_cols):
    rows = []
    try:
        fh = open(path)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    with fh:
        first = fh.readline().rstrip("\n")
        if first != header:
            raise ParseError(f"{path}:1: expected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != n_cols:
                raise ParseError(f"{path}:{lineno}: expected {n_cols} columns, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return np.array(rows).reshape(-1, n_cols)


def save_ground_truth(path, stream):
    with open(path, "w") as fh:
        fh.write(GROUND_TRUTH_HEADER + "\n")
        for t, pose in stream:
            fh.write(_fmt([t, *pose.to_row()]) + "\n")


def load_ground_truth(path):
    data = _read_csv(path, GROUND_TRUTH_HEADER, 13)
    return [(float(row[0]), Pose.from_row(row[1:])) for row in data]


def save_estimates(path, rows):
    """rows: iterable of (t, Pose, 6x6 covariance or None)."""
    with open(path, "w") as fh:
        fh.write(ESTIMATES_HEADER + "\n")
        for t, pose, cov in rows:
            x, y, psi = planar_extract(pose)
            cov = np.zeros((6, 6)) if cov is None else cov
            fh.write(_fmt([t, x, y, pose.translation[2], psi, *cov.ravel()]) + "\n")


def load_estimates(path):
    """Returns (t, x, y, z, psi, P) arrays; P has shape (n, 6, 6)."""
    data = _read_csv(path, ESTIMATES_HEADER, 41)
    return (
        data[:, 0],
        data[:, 1],
        data[:, 2],
        data[:, 3],
        data[:, 4],
        data[:, 5:].reshape(-1, 6, 6),
    )


def save_log(log: ScenarioLog, directory):
    os.makedirs(directory, exist_ok=True)
    scans_dir = os.path.join(directory, "scans")
    os.makedirs(scans_dir, exist_ok=True)
    save_ground_truth(os.path.join(directory, "ground_truth.csv"), log.ground_truth)
    with open(os.path.join(directory, "odometry.csv"), "w") as fh:
        fh.write(ODOMETRY_HEADER + "\n")
        for s in log.odometry:
            fh.write(_fmt([s.timestamp, *s.omega, *s.mu]) + "\n")
    with open(os.path.join(scans_dir, "index.csv"), "w") as fh:
        fh.write("id,t\n")
        for i, scan in enumerate(log.scans):
            fh.write(f"{i},{float(scan.timestamp)!r}\n")
            save_xyz(scan, os.path.join(scans_dir, f"{i:05d}.xyz"))
    with open(os.path.join(directory, "meta"), "w") as fh:
        for key in sorted(log.meta):
            fh.write(f"{key} = {log.meta[key]}\n")


def load_meta(path):
    meta = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            meta[key.strip()] = value.strip()
    return meta


def load_log(directory) -> ScenarioLog:
    meta = load_meta(os.path.join(directory, "meta"))
    ground_truth = load_ground_truth(os.path.join(directory, "ground_truth.csv"))
    odo = _read_csv(os.path.join(directory, "odometry.csv"), ODOMETRY_HEADER, 7)
    odometry = [OdometrySample(row[1:4], row[4:7], float(row[0])) for row in odo]
    scans = []
    index_path = os.path.join(directory, "scans", "index.csv")
    try:
        fh = open(index_path)
    except OSError as exc:
        raise ParseError(f"{index_path}: {exc}") from exc
    with fh:
        header = fh.readline().strip()
        if header != "id,t":
            raise ParseError(f"{index_path}:1: expected header 'id,t'")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                scan_id, t = line.split(",")
                scan_id, t = int(scan_id), float(t)
            except ValueError as exc:
                raise ParseError(f"{index_path}:{lineno}: {exc}") from exc
            cloud = load_xyz(os.path.join(directory, "scans", f"{scan_id:05d}.xyz"), BODY, t)
            scans.append(cloud)
    return ScenarioLog(
        ground_truth=ground_truth,
        odometry=odometry,
        scans=scans,
        seed=int(meta.get("seed", "0")),
        meta=meta,
    )
