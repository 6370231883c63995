"""Screen-space polygonal point selection and cloud painting."""

from __future__ import annotations

import numpy as np

from .cloud import PointCloud
from .errors import InvalidOperationError
from .geometry import Pose
from .polygon import points_in_polygon, polygon_is_simple

PROJECTION_PERSPECTIVE = "perspective"
PROJECTION_ORTHOGRAPHIC = "orthographic"


def project_points(points, camera: Pose, projection: str):
    """Project world points to 2-D screen coordinates of a camera looking
    along its local +z axis.  Returns (uv, visible) where ``visible`` masks
    points in front of the camera (always true for orthographic)."""
    local = camera.inverse().transform(np.atleast_2d(np.asarray(points,
                                                                dtype=float)))
    if projection == PROJECTION_ORTHOGRAPHIC:
        return local[:, :2].copy(), np.ones(len(local), dtype=bool)
    if projection == PROJECTION_PERSPECTIVE:
        visible = local[:, 2] > 1e-12
        z = np.where(visible, local[:, 2], 1.0)
        return local[:, :2] / z[:, None], visible
    raise InvalidOperationError(f"unknown projection {projection!r}")


def select_points(cloud: PointCloud, polygon, camera: Pose,
                  projection: str = PROJECTION_PERSPECTIVE):
    """Partition a cloud into (selected, rest) by projected point-in-polygon
    membership.  The partition is exact: every point lands in exactly one
    of the two outputs."""
    polygon = np.asarray(polygon, dtype=float)
    if polygon.ndim != 2 or polygon.shape[0] < 3 or polygon.shape[1] != 2:
        raise InvalidOperationError(
            "selection polygon needs at least 3 two-dimensional vertices")
    if not polygon_is_simple(polygon):
        raise InvalidOperationError("selection polygon must be simple")
    if cloud.is_empty:
        return cloud, cloud
    uv, visible = project_points(cloud.points, camera, projection)
    inside = points_in_polygon(uv, polygon) & visible
    sel = PointCloud(cloud.points[inside],
                     colors=None if cloud.colors is None else cloud.colors[inside],
                     name=cloud.name)
    rest = PointCloud(cloud.points[~inside],
                      colors=None if cloud.colors is None else cloud.colors[~inside],
                      name=cloud.name)
    return sel, rest


def paint_cloud(cloud: PointCloud, color) -> PointCloud:
    """Return a copy of the cloud with every point set to ``color`` (RGB
    0-255)."""
    return cloud.painted(color)
