"""Foundational geometric types: vectors, rigid poses, planes, closed
interpolating splines, and PCA-oriented bounding boxes.

Conventions
-----------
* 3-D points are float64 numpy arrays of shape (3,); point sets are (n, 3).
* Quaternions are stored scalar-first, (w, x, y, z), unit length.
* A slice plane is a :class:`Pose` whose origin is the plane center and
  whose local +Z axis is the plane normal.
* Splines use a uniform parameterization: integer parameter ``i`` lands
  exactly on control point ``i``; the curve is periodic with period ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputError, InvalidSplineError


@dataclass(frozen=True)
class Tolerances:
    """Central record of the numeric tolerances used by invariant checks."""

    quaternion_norm: float = 1e-9
    spline_interpolation: float = 1e-12
    obb_containment: float = 1e-9
    obb_axes_orthonormal: float = 1e-6
    pose_round_trip: float = 1e-9
    degenerate_triangle_area: float = 1e-12
    containment_epsilon: float = 1e-6


TOL = Tolerances()


def vec3(x, y=None, z=None):
    """Build a finite (3,) float64 vector from components or a sequence."""
    v = np.asarray(x, dtype=float) if y is None else np.array([x, y, z], dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


def normalized(v):
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return np.asarray(v, dtype=float) / n


# ---------------------------------------------------------------------------
# Quaternions (scalar-first)

def quat_identity():
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q):
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("zero quaternion")
    return q / n


def quat_multiply(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conjugate(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_from_axis_angle(axis, angle):
    axis = normalized(axis)
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) * axis))


def quat_to_matrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_from_matrix(m):
    """Shepperd's method; returns a unit quaternion with w >= 0."""
    m = np.asarray(m, dtype=float)
    t = np.trace(m)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2
        q = np.array([0.25 * s,
                      (m[2, 1] - m[1, 2]) / s,
                      (m[0, 2] - m[2, 0]) / s,
                      (m[1, 0] - m[0, 1]) / s])
    else:
        i = int(np.argmax(np.diag(m)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(max(m[i, i] - m[j, j] - m[k, k] + 1.0, 0.0)) * 2
        q = np.empty(4)
        q[0] = (m[k, j] - m[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (m[j, i] + m[i, j]) / s
        q[1 + k] = (m[k, i] + m[i, k]) / s
    if q[0] < 0:
        q = -q
    return quat_normalize(q)


def quat_rotation_between(a, b):
    """Minimal rotation carrying unit vector a onto unit vector b."""
    a, b = normalized(a), normalized(b)
    c = np.cross(a, b)
    d = float(np.dot(a, b))
    if d < -1 + 1e-12:
        # 180 degrees: pick any axis orthogonal to a
        axis = np.cross(a, [1.0, 0.0, 0.0])
        if np.linalg.norm(axis) < 1e-8:
            axis = np.cross(a, [0.0, 1.0, 0.0])
        return quat_from_axis_angle(axis, np.pi)
    q = np.concatenate(([1.0 + d], c))
    return quat_normalize(q)


# ---------------------------------------------------------------------------
# Poses

@dataclass(frozen=True)
class Pose:
    """A rigid transform: rotation (unit quaternion, scalar-first) then
    translation."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=quat_identity)

    def __post_init__(self):
        p = vec3(self.position)
        q = np.asarray(self.orientation, dtype=float)
        if q.shape != (4,):
            raise ValueError("orientation must be a (w, x, y, z) quaternion")
        if abs(np.linalg.norm(q) - 1.0) > TOL.quaternion_norm:
            raise ValueError("quaternion must be unit length within 1e-9")
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "orientation", q)

    @staticmethod
    def identity():
        return Pose()

    @staticmethod
    def from_axis_angle(axis, angle, position=(0.0, 0.0, 0.0)):
        return Pose(vec3(position), quat_from_axis_angle(axis, angle))

    def matrix(self):
        return quat_to_matrix(self.orientation)

    def transform(self, v):
        """Apply to one point (3,) or many (n, 3)."""
        v = np.asarray(v, dtype=float)
        return v @ self.matrix().T + self.position

    def rotate(self, v):
        """Apply only the rotation part."""
        return np.asarray(v, dtype=float) @ self.matrix().T

    def compose(self, other: "Pose") -> "Pose":
        """self then applied after other: (self * other)(v) = self(other(v))."""
        return Pose(self.transform(other.position),
                    quat_normalize(quat_multiply(self.orientation, other.orientation)))

    def inverse(self) -> "Pose":
        qc = quat_conjugate(self.orientation)
        return Pose(-(quat_to_matrix(qc) @ self.position), qc)


def pose_transform(p: Pose, v):
    return p.transform(v)


def pose_compose(a: Pose, b: Pose) -> Pose:
    return a.compose(b)


def pose_inverse(p: Pose) -> Pose:
    return p.inverse()


# ---------------------------------------------------------------------------
# Slice planes

@dataclass(frozen=True)
class SlicePlane:
    """An oriented plane: origin at the slice center, normal = local +Z."""

    pose: Pose = field(default_factory=Pose.identity)

    @property
    def center(self):
        return self.pose.position

    @property
    def normal(self):
        return self.pose.rotate(np.array([0.0, 0.0, 1.0]))

    def to_world(self, uv):
        """Lift 2-D plane coordinates (u, v) or (n, 2) into world space."""
        uv = np.asarray(uv, dtype=float)
        single = uv.ndim == 1
        uv = np.atleast_2d(uv)
        pts = np.column_stack([uv, np.zeros(len(uv))])
        out = self.pose.transform(pts)
        return out[0] if single else out

    def to_plane(self, points):
        """Project world points into (u, v) plane coordinates (drops the
        out-of-plane component)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        local = self.pose.inverse().transform(pts)
        return local[:, :2]

    def offset_along_normal(self, points):
        """Signed distance of world points from the plane."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts - self.center) @ self.normal


def plane_from_center_normal(center, normal, up_hint=None) -> SlicePlane:
    """Build a slice plane whose +Z is ``normal``; the in-plane axes are
    chosen deterministically (X from ``up_hint`` or the least-aligned world
    axis)."""
    z = normalized(normal)
    if up_hint is None:
        up_hint = np.eye(3)[int(np.argmin(np.abs(z)))]
    x = np.asarray(up_hint, dtype=float) - np.dot(up_hint, z) * z
    if np.linalg.norm(x) < 1e-12:
        up_hint = np.eye(3)[int(np.argmin(np.abs(z)))]
        x = up_hint - np.dot(up_hint, z) * z
    x = normalized(x)
    y = np.cross(z, x)
    rot = np.column_stack([x, y, z])
    return SlicePlane(Pose(vec3(center), quat_from_matrix(rot)))


# ---------------------------------------------------------------------------
# Closed interpolating splines (Cardinal basis, uniform parameterization)

@dataclass(frozen=True)
class ClosedSpline:
    """A closed curve interpolating its control points.

    ``tension`` follows the Cardinal convention where the tangent at point
    i is ``tension * (p[i+1] - p[i-1])``; 0.5 is the Catmull-Rom spline.
    """

    control_points: np.ndarray
    tension: float = 0.5

    def __post_init__(self):
        pts = np.asarray(self.control_points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidSplineError("control points must be an (n, 2) array")
        if len(pts) < 3:
            raise InvalidSplineError("a closed spline needs at least 3 control points")
        if not np.all(np.isfinite(pts)):
            raise InvalidSplineError("control points must be finite")
        if not 0.0 <= self.tension <= 1.0:
            raise InvalidSplineError("tension must lie in [0, 1]")
        object.__setattr__(self, "control_points", pts)

    def __len__(self):
        return len(self.control_points)


def eval_closed_spline(spline: ClosedSpline, t):
    """Evaluate the curve at parameter(s) t; periodic with period n and
    exact at integer parameters."""
    pts = spline.control_points
    n = len(pts)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)

    seg = np.floor(t).astype(int) % n
    u = t - np.floor(t)

    p0 = pts[(seg - 1) % n]
    p1 = pts[seg]
    p2 = pts[(seg + 1) % n]
    p3 = pts[(seg + 2) % n]
    m1 = spline.tension * (p2 - p0)
    m2 = spline.tension * (p3 - p1)

    u = u[:, None]
    u2 = u * u
    u3 = u2 * u
    h00 = 2 * u3 - 3 * u2 + 1
    h10 = u3 - 2 * u2 + u
    h01 = -2 * u3 + 3 * u2
    h11 = u3 - u2
    out = h00 * p1 + h10 * m1 + h01 * p2 + h11 * m2
    return out[0] if scalar else out


def sample_closed_spline(spline: ClosedSpline, samples_per_segment: int):
    """Discretize the whole curve into n * samples_per_segment points,
    starting exactly at control point 0."""
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be >= 1")
    n = len(spline)
    t = np.arange(n * samples_per_segment, dtype=float) / samples_per_segment
    return eval_closed_spline(spline, t)


# ---------------------------------------------------------------------------
# Oriented bounding boxes

@dataclass(frozen=True)
class OrientedBoundingBox:
    """PCA-aligned box: axes ordered by descending variance."""

    center: np.ndarray
    axes: np.ndarray          # rows are unit axis vectors
    half_extents: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", vec3(self.center))
        axes = np.asarray(self.axes, dtype=float)
        he = np.asarray(self.half_extents, dtype=float)
        if axes.shape != (3, 3) or he.shape != (3,):
            raise ValueError("axes must be 3x3 and half_extents length 3")
        if np.max(np.abs(axes @ axes.T - np.eye(3))) > TOL.obb_axes_orthonormal:
            raise ValueError("axes must be orthonormal within 1e-6")
        if np.any(he <= 0):
            raise ValueError("half extents must be positive")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "half_extents", he)

    def contains(self, points, slack=TOL.obb_containment):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        local = np.abs((pts - self.center) @ self.axes.T)
        return np.all(local <= self.half_extents + slack, axis=1)


def _fix_eigvec_signs(vectors):
    # Deterministic sign: largest-magnitude component made positive.
    out = vectors.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def compute_obb(cloud) -> OrientedBoundingBox:
    """Covariance-PCA oriented bounding box of a point cloud (or raw
    (n, 3) array). Axes are eigenvectors sorted by descending eigenvalue
    with deterministic signs; degenerate directions fall back to world
    axes."""
    pts = np.asarray(getattr(cloud, "points", cloud), dtype=float)
    if pts.size == 0:
        raise EmptyInputError("cannot compute a bounding box of an empty cloud")
    pts = np.atleast_2d(pts)

    mean = pts.mean(axis=0)
    centered = pts - mean
    if len(pts) == 1:
        axes = np.eye(3)
    else:
        cov = centered.T @ centered / len(pts)
        evals, evecs = np.linalg.eigh(cov)
        order = np.argsort(evals)[::-1]
        axes = _fix_eigvec_signs(evecs[:, order].T)
        # Re-orthogonalize the last axis so rounding cannot break handedness.
        axes[2] = np.cross(axes[0], axes[1])
        axes[2] /= np.linalg.norm(axes[2])
        j = int(np.argmax(np.abs(axes[2])))
        if axes[2, j] < 0:
            axes[2] = -axes[2]

    local = centered @ axes.T
    lo, hi = local.min(axis=0), local.max(axis=0)
    half = np.maximum((hi - lo) / 2.0, 1e-12)
    center = mean + ((hi + lo) / 2.0) @ axes
    return OrientedBoundingBox(center, axes, half)
