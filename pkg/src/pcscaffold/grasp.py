"""Parallel-gripper grasp annotation: contact extraction, Grasp Wrench
Space quality (hull volume, epsilon-distance, force closure), waypoint
paths with ghost-object poses, and the ribbon-area path metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.stats import norm, qmc

from .errors import (
    CollisionError,
    EmptyInputError,
    InvalidOperationError,
)
from .geometry import Pose, normalized, vec3
from .meshing import TriMesh, sample_surface

FRAME_SENSOR = "sensor"
FRAME_SCAFFOLD_BASE = "scaffold-base"

# Qualitative annotation scales, stored as labels only (no automatic grader).
GRASP_SCALE = ("miss", "slip", "shift", "good")
FUNCTIONAL_SCALE = ("impossible", "flawed", "good")


@dataclass(frozen=True)
class GripperModel:
    """Simplified parallel gripper: two finger patches facing each other
    along the gripper x axis, palm patch at z = 0 facing +z; fingers span
    z in [0, finger_height].
    """

    finger_width: float = 0.025
    finger_height: float = 0.04
    palm_width: float = 0.08
    palm_height: float = 0.06
    palm_depth: float = 0.02
    max_opening: float = 0.09
    min_opening: float = 0.0
    friction: float = 0.5

    def __post_init__(self):
        if not 0 <= self.min_opening < self.max_opening:
            raise InvalidOperationError("need 0 <= min_opening < max_opening")
        if min(self.finger_width, self.finger_height, self.palm_width,
               self.palm_height, self.friction) <= 0:
            raise InvalidOperationError(
                "gripper dimensions and friction must be positive")


@dataclass(frozen=True)
class Contact:
    """A frictional point contact; the normal points into the object."""

    point: np.ndarray
    normal: np.ndarray
    friction: float

    def __post_init__(self):
        object.__setattr__(self, "point", vec3(self.point))
        object.__setattr__(self, "normal", normalized(vec3(self.normal)))
        if self.friction <= 0:
            raise InvalidOperationError("friction must be positive")

    @property
    def cone_half_angle(self):
        return float(np.arctan(self.friction))


@dataclass(frozen=True)
class GraspAnnotation:
    """User-placed grasp: 6-DoF grasp pose plus pre-grasp approach pose,
    in a declared reference frame."""

    grasp_pose: Pose
    pre_grasp: Pose
    frame: str
    object_ref: str = ""
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.frame not in (FRAME_SENSOR, FRAME_SCAFFOLD_BASE):
            raise InvalidOperationError(f"unknown frame {self.frame!r}")


@dataclass(frozen=True)
class GraspQuality:
    gws_volume: float
    epsilon: float
    force_closure: bool
    torque_scale: float


@dataclass(frozen=True)
class WaypointPath:
    """Pre-pose, grasp-pose, then handling waypoints."""

    poses: tuple
    timestamps: Optional[tuple] = None
    object_ref: str = ""

    def __post_init__(self):
        object.__setattr__(self, "poses", tuple(self.poses))
        if len(self.poses) < 2:
            raise InvalidOperationError(
                "a path needs at least a pre-pose and a grasp-pose")
        if self.timestamps is not None:
            ts = tuple(float(t) for t in self.timestamps)
            if len(ts) != len(self.poses):
                raise InvalidOperationError("one timestamp per pose required")
            object.__setattr__(self, "timestamps", ts)

    @property
    def pre_pose(self):
        return self.poses[0]

    @property
    def grasp_pose(self):
        return self.poses[1]

    def positions(self):
        return np.array([p.position for p in self.poses])


# ---------------------------------------------------------------------------
# Contact extraction

def _surface_points(mesh: TriMesh, samples: int, seed: int):
    pts = sample_surface(mesh, samples, seed).points
    return np.vstack([pts, mesh.vertices])


def close_gripper(gripper: GripperModel, pose: Pose, mesh: TriMesh,
                  contact_tolerance: float = 1e-6, samples: int = 20_000,
                  seed: int = 0):
    """Advance the fingers symmetrically until each touches the object (or
    min_opening is reached) and return the contact points, 4 per touching
    finger (corners of the contact footprint)."""
    local = pose.inverse().transform(_surface_points(mesh, samples, seed))

    half_max = gripper.max_opening / 2.0
    in_palm = ((np.abs(local[:, 0]) <= half_max)
               & (np.abs(local[:, 1]) <= gripper.palm_width / 2.0)
               & (local[:, 2] >= -gripper.palm_depth) & (local[:, 2] < 0.0))
    if np.any(in_palm):
        raise CollisionError("object intersects the palm volume")

    # Points inside the closing channel swept by the finger patches.
    in_channel = ((np.abs(local[:, 1]) <= gripper.finger_width / 2.0)
                  & (local[:, 2] >= 0.0)
                  & (local[:, 2] <= gripper.finger_height)
                  & (np.abs(local[:, 0]) <= half_max))
    channel = local[in_channel]
    contacts = []
    for sign in (+1.0, -1.0):
        side = channel[sign * channel[:, 0] >= gripper.min_opening / 2.0]
        if len(side) == 0:
            continue    # this finger reaches min_opening without touching
        touch_x = float(np.max(sign * side[:, 0]))
        patch = side[sign * side[:, 0] >= touch_x - contact_tolerance]
        y0, y1 = patch[:, 1].min(), patch[:, 1].max()
        z0, z1 = patch[:, 2].min(), patch[:, 2].max()
        corners = np.array([[sign * touch_x, y0, z0],
                            [sign * touch_x, y1, z0],
                            [sign * touch_x, y1, z1],
                            [sign * touch_x, y0, z1]])
        normal_local = np.array([-sign, 0.0, 0.0])   # pressing into the object
        for c in corners:
            contacts.append(Contact(pose.transform(c),
                                    pose.rotate(normal_local),
                                    gripper.friction))
    return contacts


# ---------------------------------------------------------------------------
# Grasp wrench space

def _contact_frame(normal):
    n = normalized(normal)
    a = np.array([1.0, 0.0, 0.0])
    if abs(n @ a) > 0.9:
        a = np.array([0.0, 1.0, 0.0])
    t1 = normalized(a - (a @ n) * n)
    t2 = np.cross(n, t1)
    return t1, t2


def contact_wrenches(contacts, com, cone_edges: int = 8,
                     torque_scale: Optional[float] = None):
    """Friction-cone edge wrenches (f, ((p − com) × f)/torque_scale) for
    every contact; returns (wrenches, torque_scale)."""
    com = vec3(com)
    if torque_scale is None:
        torque_scale = max(float(np.linalg.norm(c.point - com))
                           for c in contacts)
    torque_scale = max(torque_scale, 1e-12)
    rows = []
    ang = 2 * np.pi * np.arange(cone_edges) / cone_edges
    for c in contacts:
        t1, t2 = _contact_frame(c.normal)
        for th in ang:
            f = normalized(c.normal + c.friction * (np.cos(th) * t1
                                                    + np.sin(th) * t2))
            tau = np.cross(c.point - com, f) / torque_scale
            rows.append(np.concatenate([f, tau]))
    return np.array(rows), float(torque_scale)


def _support_directions(count, seed=0):
    """Low-discrepancy unit directions in 6-D (Halton + inverse normal)."""
    sampler = qmc.Halton(d=6, scramble=False, seed=seed)
    u = sampler.random(count + 1)[1:]     # skip the all-zero first point
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def grasp_quality(contacts, com, cone_edges: int = 8,
                  direction_samples: int = 1024) -> GraspQuality:
    """GWS quality: hull volume, certified lower-bound epsilon, and force
    closure, with torques normalized by the largest contact-to-COM arm."""
    if cone_edges < 4:
        raise InvalidOperationError("need at least 4 friction-cone edges")
    if direction_samples < 64:
        raise InvalidOperationError("need at least 64 direction samples")
    contacts = list(contacts)
    if not contacts:
        return GraspQuality(0.0, 0.0, False, 0.0)

    W, torque_scale = contact_wrenches(contacts, com, cone_edges)
    pts = np.vstack([np.zeros((1, 6)), W])

    try:
        hull = ConvexHull(pts)
        gws_volume = float(hull.volume)
    except QhullError:
        gws_volume = 0.0     # hull is degenerate (dimension < 6)

    # Inner approximation: support vertices of the wrench set over sampled
    # directions; its inradius about the origin is a lower bound of the
    # true epsilon.
    dirs = _support_directions(direction_samples)
    support_idx = np.unique(np.argmax(W @ dirs.T, axis=0))
    inner = np.vstack([np.zeros((1, 6)), W[support_idx]])
    epsilon = 0.0
    try:
        q = ConvexHull(inner)
        # Facet equations: normal·x + offset <= 0 inside. Distance of the
        # origin to each facet plane is -offset; origin strictly interior
        # iff every offset < 0.
        offsets = q.equations[:, -1]
        if np.all(offsets < -1e-9):
            epsilon = float(np.min(-offsets))
    except QhullError:
        epsilon = 0.0
    force_closure = epsilon > 1e-9
    if not force_closure:
        epsilon = 0.0
    return GraspQuality(gws_volume=gws_volume, epsilon=epsilon,
                        force_closure=force_closure,
                        torque_scale=torque_scale)


# ---------------------------------------------------------------------------
# Paths

def ghost_pose(path: WaypointPath, index: int) -> Pose:
    """Pose of the grasped object at a waypoint: the object rides the
    gripper with the transform captured at the grasp waypoint."""
    if not 0 <= index < len(path.poses):
        raise InvalidOperationError(f"waypoint index {index} out of range")
    grasp = path.grasp_pose
    return path.poses[index].compose(grasp.inverse())


def path_length(path: WaypointPath) -> float:
    pos = path.positions()
    return float(np.linalg.norm(np.diff(pos, axis=0), axis=1).sum())


def _resample_polyline(points, n):
    points = np.asarray(points, dtype=float)
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    total = seg.sum()
    if total < 1e-15:
        return np.tile(points[0], (n, 1))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    stations = np.linspace(0.0, total, n)
    out = np.empty((n, points.shape[1]))
    for k, st in enumerate(stations):
        i = int(np.clip(np.searchsorted(cum, st, side="right") - 1, 0,
                        len(seg) - 1))
        u = 0.0 if seg[i] == 0 else (st - cum[i]) / seg[i]
        out[k] = (1 - u) * points[i] + u * points[i + 1]
    return out


def ribbon_area(path_a, path_b, resample_n: int = 256) -> float:
    """Area of the triangulated ribbon between two paths after arc-length
    resampling; zero for identical paths, symmetric in its arguments."""
    if resample_n < 2:
        raise InvalidOperationError("resample_n must be >= 2")
    pa = path_a.positions() if isinstance(path_a, WaypointPath) else np.asarray(path_a, float)
    pb = path_b.positions() if isinstance(path_b, WaypointPath) else np.asarray(path_b, float)
    if len(pa) < 1 or len(pb) < 1:
        raise EmptyInputError("paths must contain points")
    a = _resample_polyline(pa, resample_n)
    b = _resample_polyline(pb, resample_n)

    def one_way(a, b):
        # Triangle pairs (a_i, a_{i+1}, b_i) and (b_i, a_{i+1}, b_{i+1}).
        area = 0.0
        for i in range(resample_n - 1):
            area += 0.5 * np.linalg.norm(np.cross(a[i + 1] - a[i], b[i] - a[i]))
            area += 0.5 * np.linalg.norm(np.cross(a[i + 1] - b[i],
                                                  b[i + 1] - b[i]))
        return area

    # Average both quad diagonals so the metric is exactly symmetric even
    # on warped (non-planar) ribbons; identical to a single split whenever
    # each quad is planar.
    return float((one_way(a, b) + one_way(b, a)) / 2.0)
