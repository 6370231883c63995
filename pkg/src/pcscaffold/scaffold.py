"""The point-cloud scaffold model: ordered planar spline contours (slices)
swept along an axis, with optional hole contours, plus every insertion and
editing operation over them.

All operations are pure: they validate, then return a new scaffold, or
raise a typed error leaving the input untouched.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cloud import PointCloud
from .errors import (
    ContainmentViolationError,
    EmptyInputError,
    InvalidOperationError,
    UnsupportedOperationError,
)
from .geometry import (
    ClosedSpline,
    OrientedBoundingBox,
    Pose,
    SlicePlane,
    compute_obb,
    normalized,
    plane_from_center_normal,
    quat_from_axis_angle,
    quat_multiply,
    quat_normalize,
    quat_rotation_between,
    sample_closed_spline,
    vec3,
)
from .polygon import (
    distance_to_polygon,
    ensure_ccw,
    points_in_polygon,
    polygon_is_simple,
    star_polygon_radii,
)

EXTERNAL = "external"
HOLE = "hole"

# Sampling density used when contours are discretized for validation.
VALIDATION_SAMPLES = 8


@dataclass(frozen=True)
class Handle:
    """One contour control point, in slice-plane coordinates."""

    position: np.ndarray
    kind: str = EXTERNAL

    def __post_init__(self):
        p = np.asarray(self.position, dtype=float)
        if p.shape != (2,) or not np.all(np.isfinite(p)):
            raise ValueError("handle position must be a finite 2-D point")
        if self.kind not in (EXTERNAL, HOLE):
            raise ValueError(f"unknown handle kind {self.kind!r}")
        object.__setattr__(self, "position", p)


@dataclass(frozen=True)
class Slice:
    """One scaffold station: an oriented plane carrying an external handle
    ring and optionally a hole ring (both in plane coordinates)."""

    plane: SlicePlane
    external_handles: np.ndarray            # (k, 2), k >= 3
    hole_handles: Optional[np.ndarray] = None
    hole_scale: float = 1.0

    def __post_init__(self):
        ext = np.asarray(self.external_handles, dtype=float)
        if ext.ndim != 2 or ext.shape[1] != 2 or len(ext) < 3:
            raise InvalidOperationError("a slice needs >= 3 external handles")
        if not np.all(np.isfinite(ext)):
            raise InvalidOperationError("handle positions must be finite")
        if not polygon_is_simple(ext):
            raise InvalidOperationError(
                "external handles must form a simple polygon")
        object.__setattr__(self, "external_handles", ext)
        if self.hole_handles is not None:
            hole = np.asarray(self.hole_handles, dtype=float)
            if hole.ndim != 2 or hole.shape[1] != 2 or len(hole) < 3:
                raise InvalidOperationError("a hole needs >= 3 handles")
            if not np.all(np.isfinite(hole)):
                raise InvalidOperationError("handle positions must be finite")
            if not polygon_is_simple(hole):
                raise InvalidOperationError(
                    "hole handles must form a simple polygon")
            object.__setattr__(self, "hole_handles", hole)
        if self.hole_scale <= 0:
            raise InvalidOperationError("hole_scale must be positive")

    @property
    def has_hole(self):
        return self.hole_handles is not None

    def ring(self, kind):
        if kind == EXTERNAL:
            return self.external_handles
        if kind == HOLE:
            if self.hole_handles is None:
                raise InvalidOperationError("slice has no hole contour")
            return self.hole_handles
        raise ValueError(f"unknown handle kind {kind!r}")

    def handles(self, kind=EXTERNAL):
        return [Handle(p, kind) for p in self.ring(kind)]

    @property
    def center(self):
        return self.plane.center

    @property
    def normal(self):
        return self.plane.normal


@dataclass(frozen=True)
class Scaffold:
    """Ordered slices swept along the polyline of their centers."""

    slices: tuple
    cloud: Optional[PointCloud] = None
    name: str = ""
    tension: float = 0.5
    obb: Optional[OrientedBoundingBox] = None   # present for OBB-inserted scaffolds
    primitive: Optional[str] = None             # "cylinder" | "box" when inserted

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))
        validate_scaffold(self)

    @property
    def sweep_axis(self):
        """Slice centers, one per slice (derived)."""
        return np.array([s.center for s in self.slices])

    @property
    def n_slices(self):
        return len(self.slices)

    def replace(self, **kw) -> "Scaffold":
        return dataclasses.replace(self, **kw)

    def with_slice(self, index, new_slice) -> "Scaffold":
        slices = list(self.slices)
        slices[index] = new_slice
        return self.replace(slices=tuple(slices))


@dataclass(frozen=True)
class PartAssembly:
    """A multi-part object: one scaffold per part."""

    parts: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) < 1:
            raise EmptyInputError("an assembly needs at least one part")


# ---------------------------------------------------------------------------
# Validation

def sampled_ring(slice_, kind, tension, samples_per_segment=VALIDATION_SAMPLES):
    """Discretized contour polygon of one slice, in plane coordinates."""
    spline = ClosedSpline(slice_.ring(kind), tension)
    return sample_closed_spline(spline, samples_per_segment)


def _check_hole_inside(slice_, tension):
    if not slice_.has_hole:
        return
    outer = sampled_ring(slice_, EXTERNAL, tension)
    inner = sampled_ring(slice_, HOLE, tension)
    inside = points_in_polygon(inner, outer)
    if not np.all(inside):
        raise ContainmentViolationError(
            "hole contour is not strictly inside the external contour")
    if np.min(distance_to_polygon(inner, outer)) <= 1e-12:
        raise ContainmentViolationError(
            "hole contour touches the external contour")


def validate_scaffold(s: Scaffold):
    if len(s.slices) < 2:
        raise InvalidOperationError("a scaffold needs at least 2 slices")
    centers = np.array([sl.center for sl in s.slices])
    gaps = np.linalg.norm(np.diff(centers, axis=0), axis=1)
    coincident = gaps < 1e-12
    if np.any(coincident):
        # Identical consecutive planes are allowed only when the slices are
        # literally duplicated (zero-length segment, skipped by the mesher);
        # non-identical coincident planes are an error.
        for i in np.flatnonzero(coincident):
            a, b = s.slices[i], s.slices[i + 1]
            if not (np.allclose(a.external_handles, b.external_handles)
                    and np.allclose(a.plane.pose.orientation, b.plane.pose.orientation)):
                raise InvalidOperationError(
                    f"slices {i} and {i + 1} have coincident, non-identical planes")
    for i, sl in enumerate(s.slices):
        try:
            _check_hole_inside(sl, s.tension)
        except ContainmentViolationError as e:
            raise ContainmentViolationError(f"slice {i}: {e}") from None


def hole_runs(s: Scaffold):
    """Maximal runs of consecutive slices carrying holes, as inclusive
    (start, end) index pairs; only runs of length >= 2 produce volume."""
    runs = []
    start = None
    for i, sl in enumerate(s.slices):
        if sl.has_hole and start is None:
            start = i
        elif not sl.has_hole and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(s.slices) - 1))
    return [(a, b) for a, b in runs if b > a]


def scaffolds_allclose(a: Scaffold, b: Scaffold, tol=1e-9):
    """Field-by-field geometric comparison of two scaffolds."""
    if a.n_slices != b.n_slices:
        return False
    for sa, sb in zip(a.slices, b.slices):
        if not np.allclose(sa.center, sb.center, atol=tol):
            return False
        qa, qb = sa.plane.pose.orientation, sb.plane.pose.orientation
        if not (np.allclose(qa, qb, atol=tol) or np.allclose(qa, -qb, atol=tol)):
            return False
        if sa.external_handles.shape != sb.external_handles.shape:
            return False
        if not np.allclose(sa.external_handles, sb.external_handles, atol=tol):
            return False
        if sa.has_hole != sb.has_hole:
            return False
        if sa.has_hole and not np.allclose(sa.hole_handles, sb.hole_handles, atol=tol):
            return False
    return True


# ---------------------------------------------------------------------------
# Contour pattern rings

def regular_polygon_ring(count, radius, center=(0.0, 0.0)):
    if count < 3 or radius <= 0:
        raise InvalidOperationError("pattern needs >= 3 handles and a positive radius")
    ang = 2 * np.pi * np.arange(count) / count
    return np.asarray(center, dtype=float) + radius * np.column_stack(
        [np.cos(ang), np.sin(ang)])


def ellipse_ring(count, a, b, center=(0.0, 0.0)):
    if count < 3 or a <= 0 or b <= 0:
        raise InvalidOperationError("ellipse needs >= 3 handles and positive semi-axes")
    ang = 2 * np.pi * np.arange(count) / count
    return np.asarray(center, dtype=float) + np.column_stack(
        [a * np.cos(ang), b * np.sin(ang)])


def rectangle_ring(count, width, height, center=(0.0, 0.0)):
    """Handles spread uniformly along a rectangle's perimeter, corners
    included when ``count`` is a multiple of 4; starts at (+w/2, +h/2)."""
    if count < 4 or width <= 0 or height <= 0:
        raise InvalidOperationError("rectangle needs >= 4 handles and positive sides")
    w, h = width / 2.0, height / 2.0
    corners = np.array([[w, h], [-w, h], [-w, -h], [w, -h]], dtype=float)
    ring = np.empty((count, 2))
    if count % 4 == 0:
        # Equal handles per side, each side starting at a corner, so the
        # corners are always handles.
        per = count // 4
        for side in range(4):
            a, b = corners[side], corners[(side + 1) % 4]
            for j in range(per):
                ring[side * per + j] = a + (j / per) * (b - a)
    else:
        lens = np.array([width, height, width, height], dtype=float)
        perim = lens.sum()
        cum = np.concatenate([[0.0], np.cumsum(lens)])
        for i in range(count):
            d = perim * i / count
            side = min(int(np.searchsorted(cum, d, side="right")) - 1, 3)
            t = (d - cum[side]) / lens[side]
            ring[i] = corners[side] + t * (corners[(side + 1) % 4] - corners[side])
    return np.asarray(center, dtype=float) + ring


# ---------------------------------------------------------------------------
# Insertion

def _containment_scale(ring, center, pts_2d, tension):
    """Uniform scale factor about ``center`` that makes the sampled spline
    through ``ring`` enclose all points."""
    if len(pts_2d) == 0:
        return 1.0
    poly = sample_closed_spline(ClosedSpline(ring, tension), VALIDATION_SAMPLES)
    rel = pts_2d - center
    r = np.linalg.norm(rel, axis=1)
    mask = r > 1e-12
    if not np.any(mask):
        return 1.0
    ang = np.arctan2(rel[mask, 1], rel[mask, 0])
    boundary = star_polygon_radii(poly, center, ang)
    ratio = np.max(r[mask] / np.maximum(boundary, 1e-300))
    return max(1.0, float(ratio)) * (1.0 + 1e-9)


def _primitive_ring(primitive, n_handles, half_u, half_v, center):
    if primitive == "cylinder":
        return ellipse_ring(n_handles, half_u, half_v, center)
    if primitive == "box":
        return rectangle_ring(n_handles, 2 * half_u, 2 * half_v, center)
    raise InvalidOperationError(f"unknown primitive {primitive!r}")


def _insert_along_direction(cloud, direction, primitive, n_slices, n_handles,
                            tension, obb=None, name=""):
    if cloud is None or cloud.is_empty:
        raise EmptyInputError("cannot insert a scaffold over an empty cloud")
    if n_slices < 2:
        raise InvalidOperationError("need at least 2 slices")
    if n_handles < 3:
        raise InvalidOperationError("need at least 3 handles")
    direction = normalized(vec3(direction))

    pts = cloud.points
    t = pts @ direction
    t0, t1 = float(t.min()), float(t.max())
    if t1 - t0 < 1e-12:
        t1 = t0 + 1e-6    # flat cloud: separate the end slices minimally
    stations = np.linspace(t0, t1, n_slices)
    half_gap = (t1 - t0) / (n_slices - 1) / 2.0

    # Shared in-plane frame so that handle indices correspond across slices.
    frame = plane_from_center_normal(direction * t0, direction)
    uv_all = frame.to_plane(pts)

    # Midplane slab partition along the insertion direction.
    slab_of = np.clip(np.round((t - t0) / (2 * half_gap + 1e-300)).astype(int)
                      if n_slices > 1 else np.zeros(len(t), int), 0, n_slices - 1)

    full_lo, full_hi = uv_all.min(axis=0), uv_all.max(axis=0)
    slices = []
    for i, ti in enumerate(stations):
        sel = uv_all[slab_of == i]
        if len(sel) == 0:
            lo, hi = full_lo, full_hi
        else:
            lo, hi = sel.min(axis=0), sel.max(axis=0)
        center_uv = (lo + hi) / 2.0
        half_u = max((hi[0] - lo[0]) / 2.0, 1e-6)
        half_v = max((hi[1] - lo[1]) / 2.0, 1e-6)
        ring = _primitive_ring(primitive, n_handles, half_u, half_v, center_uv)
        if len(sel):
            s = _containment_scale(ring, center_uv, sel, tension)
            ring = center_uv + s * (ring - center_uv)
        plane = plane_from_center_normal(
            frame.to_world(center_uv) + (ti - t0) * direction, direction)
        # Express handles relative to the slice's own plane origin.
        slices.append(Slice(plane, ring - center_uv))
    return Scaffold(tuple(slices), cloud=cloud, name=name, tension=tension,
                    obb=obb, primitive=primitive)


def insert_scaffold_obb(cloud: PointCloud, primitive="cylinder", n_slices=5,
                        n_handles=8, tension=0.5, name="") -> Scaffold:
    """Insert a scaffold whose slices run along the dominant axis of the
    cloud's oriented bounding box."""
    obb = compute_obb(cloud)
    return _insert_along_direction(cloud, obb.axes[0], primitive, n_slices,
                                   n_handles, tension, obb=obb, name=name)


def insert_scaffold_pov(cloud: PointCloud, view_direction, primitive="cylinder",
                        n_slices=5, n_handles=8, tension=0.5, name="") -> Scaffold:
    """Insert a scaffold swept along the user's viewing direction, end
    planes at the nearest and furthest point projections."""
    view_direction = vec3(view_direction)
    if np.linalg.norm(view_direction) == 0:
        raise InvalidOperationError("view direction must be nonzero")
    return _insert_along_direction(cloud, view_direction, primitive, n_slices,
                                   n_handles, tension, name=name)


def reverse_sweep(s: Scaffold) -> Scaffold:
    """Reverse the slice order; geometry is unchanged."""
    return s.replace(slices=tuple(reversed(s.slices)))


def permute_sweep_axis(s: Scaffold, axis_index: int) -> Scaffold:
    """Re-insert an OBB scaffold along another principal axis."""
    if axis_index not in (0, 1, 2):
        raise InvalidOperationError("axis index must be 0, 1 or 2")
    if s.obb is None or s.primitive is None:
        raise UnsupportedOperationError(
            "axis permutation requires an OBB-inserted scaffold")
    return _insert_along_direction(s.cloud, s.obb.axes[axis_index], s.primitive,
                                   s.n_slices, len(s.slices[0].external_handles),
                                   s.tension, obb=s.obb, name=s.name)


# ---------------------------------------------------------------------------
# Editing

def _check_index(s: Scaffold, index):
    if not 0 <= index < s.n_slices:
        raise InvalidOperationError(f"slice index {index} out of range")


def transform_slice(s: Scaffold, slice_index, translation=(0.0, 0.0, 0.0),
                    rotation=0.0, scale=1.0) -> Scaffold:
    """Similarity-transform one slice: translation is (du, dv, dn) in the
    slice frame, rotation is about the plane normal, scale is uniform about
    the slice center."""
    _check_index(s, slice_index)
    if scale <= 0:
        raise InvalidOperationError("scale must be positive")
    sl = s.slices[slice_index]
    du, dv, dn = translation
    new_center = sl.plane.to_world(np.array([du, dv])) + dn * sl.normal
    q = quat_normalize(quat_multiply(
        sl.plane.pose.orientation, quat_from_axis_angle([0, 0, 1], rotation)))
    plane = SlicePlane(Pose(new_center, q))
    new = Slice(plane, sl.external_handles * scale,
                None if sl.hole_handles is None else sl.hole_handles * scale,
                sl.hole_scale)
    return s.with_slice(slice_index, new)


def transform_scaffold(s: Scaffold, delta: Pose, scale=1.0) -> Scaffold:
    """Whole-scaffold similarity transform: v -> delta(scale * v)."""
    if scale <= 0:
        raise InvalidOperationError("scale must be positive")
    slices = []
    for sl in s.slices:
        pos = delta.transform(scale * sl.center)
        q = quat_normalize(quat_multiply(delta.orientation, sl.plane.pose.orientation))
        slices.append(Slice(SlicePlane(Pose(pos, q)),
                            sl.external_handles * scale,
                            None if sl.hole_handles is None else sl.hole_handles * scale,
                            sl.hole_scale))
    return s.replace(slices=tuple(slices), obb=None)


def set_slice_spacing_scale(s: Scaffold, factor) -> Scaffold:
    """Scale slice-center spacing about the sweep-axis centroid, leaving
    every contour unscaled."""
    if factor <= 0:
        raise InvalidOperationError("spacing factor must be positive")
    centers = s.sweep_axis
    centroid = centers.mean(axis=0)
    slices = []
    for sl, c in zip(s.slices, centers):
        pos = centroid + factor * (c - centroid)
        slices.append(Slice(SlicePlane(Pose(pos, sl.plane.pose.orientation)),
                            sl.external_handles, sl.hole_handles, sl.hole_scale))
    return s.replace(slices=tuple(slices))


def _resample_ring(ring, count, tension):
    if len(ring) == count:
        return np.asarray(ring, dtype=float).copy()
    spline = ClosedSpline(ring, tension)
    t = np.arange(count) * len(ring) / count
    from .geometry import eval_closed_spline
    return eval_closed_spline(spline, t)


def _slerp(qa, qb, u):
    qa, qb = np.asarray(qa, float), np.asarray(qb, float)
    if np.dot(qa, qb) < 0:
        qb = -qb
    d = np.clip(np.dot(qa, qb), -1.0, 1.0)
    if d > 1 - 1e-12:
        return quat_normalize(qa + u * (qb - qa))
    th = np.arccos(d)
    return quat_normalize((np.sin((1 - u) * th) * qa + np.sin(u * th) * qb) / np.sin(th))


def insert_slice(s: Scaffold, at_parameter: float) -> Scaffold:
    """Insert a slice interpolated between its neighbors at a fractional
    sweep position."""
    n = s.n_slices
    if not 0 < at_parameter < n - 1 or at_parameter == int(at_parameter):
        raise InvalidOperationError(
            "insertion parameter must lie strictly between two slices")
    i = int(np.floor(at_parameter))
    u = at_parameter - i
    a, b = s.slices[i], s.slices[i + 1]
    pos = (1 - u) * a.center + u * b.center
    q = _slerp(a.plane.pose.orientation, b.plane.pose.orientation, u)
    count = max(len(a.external_handles), len(b.external_handles))
    ext = ((1 - u) * _resample_ring(a.external_handles, count, s.tension)
           + u * _resample_ring(b.external_handles, count, s.tension))
    hole = None
    hole_scale = 1.0
    if a.has_hole and b.has_hole:
        hcount = max(len(a.hole_handles), len(b.hole_handles))
        hole = ((1 - u) * _resample_ring(a.hole_handles, hcount, s.tension)
                + u * _resample_ring(b.hole_handles, hcount, s.tension))
        hole_scale = (1 - u) * a.hole_scale + u * b.hole_scale
    new = Slice(SlicePlane(Pose(pos, q)), ext, hole, hole_scale)
    slices = list(s.slices)
    slices.insert(i + 1, new)
    return s.replace(slices=tuple(slices))


def delete_slice(s: Scaffold, index) -> Scaffold:
    _check_index(s, index)
    if s.n_slices <= 2:
        raise InvalidOperationError("cannot delete below 2 slices")
    slices = list(s.slices)
    del slices[index]
    return s.replace(slices=tuple(slices))


def move_handle(s: Scaffold, slice_index, kind, handle_index, new_position) -> Scaffold:
    """Move one handle within its constraining plane."""
    _check_index(s, slice_index)
    sl = s.slices[slice_index]
    ring = sl.ring(kind).copy()
    if not 0 <= handle_index < len(ring):
        raise InvalidOperationError(f"handle index {handle_index} out of range")
    ring[handle_index] = np.asarray(new_position, dtype=float)
    if kind == EXTERNAL:
        new = Slice(sl.plane, ring, sl.hole_handles, sl.hole_scale)
    else:
        new = Slice(sl.plane, sl.external_handles, ring, sl.hole_scale)
    return s.with_slice(slice_index, new)


def apply_pattern(s: Scaffold, slice_index, kind, pattern, **params) -> Scaffold:
    """Replace a handle ring with a canonical pattern: ``regular-polygon``
    (count, radius) or ``rectangle`` (count, width, height), optionally
    centered at ``center``."""
    _check_index(s, slice_index)
    center = params.pop("center", (0.0, 0.0))
    if pattern == "regular-polygon":
        ring = regular_polygon_ring(params["count"], params["radius"], center)
    elif pattern == "rectangle":
        ring = rectangle_ring(params["count"], params["width"], params["height"], center)
    else:
        raise InvalidOperationError(f"unknown pattern {pattern!r}")
    sl = s.slices[slice_index]
    if kind == EXTERNAL:
        new = Slice(sl.plane, ring, sl.hole_handles, sl.hole_scale)
    else:
        new = Slice(sl.plane, sl.external_handles, ring, sl.hole_scale)
    return s.with_slice(slice_index, new)


def copy_handles(s: Scaffold, from_slice, to_slice, kind=EXTERNAL) -> Scaffold:
    _check_index(s, from_slice)
    _check_index(s, to_slice)
    ring = s.slices[from_slice].ring(kind).copy()
    sl = s.slices[to_slice]
    if kind == EXTERNAL:
        new = Slice(sl.plane, ring, sl.hole_handles, sl.hole_scale)
    else:
        new = Slice(sl.plane, sl.external_handles, ring, sl.hole_scale)
    return s.with_slice(to_slice, new)


def add_hole(s: Scaffold, slice_indices, n_handles=8,
             initial_radius_fraction=0.5) -> Scaffold:
    """Insert a hole ring on each addressed slice: a centroid-centered,
    scaled copy of the external contour."""
    if not 0 < initial_radius_fraction < 1:
        raise InvalidOperationError("radius fraction must lie in (0, 1)")
    if n_handles < 3:
        raise InvalidOperationError("a hole needs >= 3 handles")
    slices = list(s.slices)
    for i in slice_indices:
        _check_index(s, i)
        sl = slices[i]
        if sl.has_hole:
            raise InvalidOperationError(f"slice {i} already has a hole")
        ext = _resample_ring(sl.external_handles, n_handles, s.tension)
        centroid = sl.external_handles.mean(axis=0)
        hole = centroid + initial_radius_fraction * (ext - centroid)
        slices[i] = Slice(sl.plane, sl.external_handles, hole, 1.0)
    return s.replace(slices=tuple(slices))


def scale_hole(s: Scaffold, slice_index, factor) -> Scaffold:
    _check_index(s, slice_index)
    if factor <= 0:
        raise InvalidOperationError("hole scale factor must be positive")
    sl = s.slices[slice_index]
    if not sl.has_hole:
        raise InvalidOperationError(f"slice {slice_index} has no hole")
    centroid = sl.hole_handles.mean(axis=0)
    hole = centroid + factor * (sl.hole_handles - centroid)
    new = Slice(sl.plane, sl.external_handles, hole, sl.hole_scale * factor)
    return s.with_slice(slice_index, new)


def set_sweep_axis_2d(s: Scaffold, plane: SlicePlane, polyline) -> Scaffold:
    """Constrain the sweep axis to a plane: slice centers follow the given
    2-D polyline (off-plane offsets preserved) and slice normals re-aim
    along the smoothed local tangent."""
    polyline = np.asarray(polyline, dtype=float)
    if polyline.ndim != 2 or polyline.shape[1] != 2 or len(polyline) != s.n_slices:
        raise InvalidOperationError(
            "polyline must supply exactly one 2-D point per slice")
    offsets = plane.offset_along_normal(s.sweep_axis)
    centers = plane.to_world(polyline) + offsets[:, None] * plane.normal

    segs = np.diff(centers, axis=0)
    lens = np.linalg.norm(segs, axis=1, keepdims=True)
    if np.any(lens < 1e-12):
        raise InvalidOperationError("polyline has coincident consecutive points")
    dirs = segs / lens
    tangents = np.empty_like(centers)
    tangents[0] = dirs[0]
    tangents[-1] = dirs[-1]
    for i in range(1, len(centers) - 1):
        tangents[i] = normalized(dirs[i - 1] + dirs[i])

    slices = []
    for sl, c, tg in zip(s.slices, centers, tangents):
        spin = quat_rotation_between(sl.normal, tg)
        q = quat_normalize(quat_multiply(spin, sl.plane.pose.orientation))
        slices.append(Slice(SlicePlane(Pose(c, q)), sl.external_handles,
                            sl.hole_handles, sl.hole_scale))
    return s.replace(slices=tuple(slices))


# ---------------------------------------------------------------------------
# Shrink-wrap

def _axis_coordinate(centers, points):
    """Arc-length coordinate of each point projected onto the sweep-axis
    polyline, plus the arc-length of each slice center."""
    seg = np.diff(centers, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    station_s = np.concatenate([[0.0], np.cumsum(seg_len)])
    best_d = np.full(len(points), np.inf)
    best_s = np.zeros(len(points))
    for i in range(len(seg)):
        d = seg[i]
        L2 = max(float(d @ d), 1e-300)
        t = np.clip((points - centers[i]) @ d / L2, 0.0, 1.0)
        proj = centers[i] + t[:, None] * d
        dist = np.linalg.norm(points - proj, axis=1)
        closer = dist < best_d
        best_d[closer] = dist[closer]
        best_s[closer] = station_s[i] + t[closer] * seg_len[i]
    return best_s, station_s


def slab_assignment(s: Scaffold, points):
    """Index of the slice whose center is nearest along the sweep axis."""
    centers = s.sweep_axis
    ps, ss = _axis_coordinate(centers, np.asarray(points, dtype=float))
    return np.argmin(np.abs(ps[:, None] - ss[None, :]), axis=1)


def shrink_wrap(s: Scaffold, slice_indices=None, on_warning=None) -> Scaffold:
    """Snap addressed slices onto the underlying cloud: the slice center
    moves (in-plane) to its slab centroid and each external handle's radius
    becomes the furthest point distance inside its angular sector."""
    if s.cloud is None or s.cloud.is_empty:
        raise EmptyInputError("shrink-wrap needs a non-empty source cloud")
    if slice_indices is None:
        slice_indices = range(s.n_slices)
    slice_indices = sorted(set(slice_indices))
    for i in slice_indices:
        _check_index(s, i)

    assign = slab_assignment(s, s.cloud.points)
    slices = list(s.slices)
    for i in slice_indices:
        sl = slices[i]
        slab = s.cloud.points[assign == i]
        if len(slab) == 0:
            if on_warning is not None:
                on_warning(f"slice {i}: empty slab, left unchanged")
            continue
        uv = sl.plane.to_plane(slab)
        center_uv = uv.mean(axis=0)
        rel = uv - center_uv
        pr = np.linalg.norm(rel, axis=1)
        pang = np.arctan2(rel[:, 1], rel[:, 0])

        ring = sl.external_handles - sl.external_handles.mean(axis=0)
        hang = np.arctan2(ring[:, 1], ring[:, 0])
        hrad = np.linalg.norm(ring, axis=1)
        n = len(ring)
        new_ring = np.empty_like(ring)
        for k in range(n):
            diff = np.angle(np.exp(1j * (pang - hang[k])))
            sector = np.abs(diff) <= np.pi / n
            r = np.max(pr[sector]) if np.any(sector) else hrad[k]
            new_ring[k] = r * np.array([np.cos(hang[k]), np.sin(hang[k])])

        new_center = sl.plane.to_world(center_uv)
        plane = SlicePlane(Pose(new_center, sl.plane.pose.orientation))
        hole = sl.hole_handles
        if hole is not None:
            # Hole handles stay fixed relative to the contour centroid.
            hole = hole - sl.external_handles.mean(axis=0) + new_ring.mean(axis=0)
        slices[i] = Slice(plane, new_ring, hole, sl.hole_scale)
    return s.replace(slices=tuple(slices))


# ---------------------------------------------------------------------------
# Containment check used by insertion invariants

def containment_fraction(s: Scaffold, cloud=None, eps=1e-6):
    """Fraction of cloud points whose in-plane projection falls inside
    their slab's contour polygon."""
    cloud = cloud if cloud is not None else s.cloud
    if cloud is None or cloud.is_empty:
        raise EmptyInputError("no cloud to check containment against")
    assign = slab_assignment(s, cloud.points)
    ok = 0
    for i, sl in enumerate(s.slices):
        pts = cloud.points[assign == i]
        if len(pts) == 0:
            continue
        poly = ensure_ccw(sampled_ring(sl, EXTERNAL, s.tension))
        uv = sl.plane.to_plane(pts)
        ok += int(np.count_nonzero(points_in_polygon(uv, poly, eps=eps)))
    return ok / len(cloud.points)
