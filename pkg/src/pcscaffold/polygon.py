"""Small 2-D polygon utilities shared by the scaffold editor and mesher."""

from __future__ import annotations

import numpy as np


def signed_area(poly):
    """Shoelace area; positive for counter-clockwise polygons."""
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def ensure_ccw(poly):
    p = np.asarray(poly, dtype=float)
    return p if signed_area(p) >= 0 else p[::-1].copy()


def points_in_polygon(points, poly, eps=0.0):
    """Even-odd point-in-polygon test, vectorized over query points.

    ``eps`` expands the polygon: points within ``eps`` of an edge count as
    inside.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(poly, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    px, py = poly[:, 0], poly[:, 1]
    qx, qy = np.roll(px, -1), np.roll(py, -1)
    for i in range(len(poly)):
        x1, y1, x2, y2 = px[i], py[i], qx[i], qy[i]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (y - y1) / (y2 - y1) * (x2 - x1)
        inside ^= crosses & (x < np.where(crosses, xint, np.inf))
    if eps > 0:
        near = distance_to_polygon(pts, poly) <= eps
        inside |= near
    return inside


def distance_to_polygon(points, poly):
    """Distance from each query point to the polygon boundary."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(poly, dtype=float)
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a                                  # (m, 2)
    ab2 = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    ap = pts[:, None, :] - a[None, :, :]        # (n, m, 2)
    t = np.clip(np.einsum("nmj,mj->nm", ap, ab) / ab2, 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    d = np.linalg.norm(pts[:, None, :] - closest, axis=2)
    return d.min(axis=1)


def polygon_is_simple(poly, tol=1e-12):
    """True when no two non-adjacent edges intersect."""
    p = np.asarray(poly, dtype=float)
    n = len(p)
    segs = [(p[i], p[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_intersect(*segs[i], *segs[j], tol):
                return False
    return True


def _segments_intersect(a1, a2, b1, b2, tol):
    d1 = a2 - a1
    d2 = b2 - b1
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(denom) < tol:
        return False
    r = b1 - a1
    t = (r[0] * d2[1] - r[1] * d2[0]) / denom
    u = (r[0] * d1[1] - r[1] * d1[0]) / denom
    return tol < t < 1 - tol and tol < u < 1 - tol


def star_polygon_radii(poly, center, angles):
    """Distance from ``center`` to the polygon boundary along each ray
    direction; the polygon must be star-shaped about ``center``."""
    poly = np.asarray(poly, dtype=float) - np.asarray(center, dtype=float)
    a = poly
    b = np.roll(poly, -1, axis=0)
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])  # (k, 2)
    radii = np.full(len(angles), np.inf)
    for i in range(len(poly)):
        e = b[i] - a[i]
        denom = dirs[:, 0] * (-e[1]) - dirs[:, 1] * (-e[0])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (a[i][0] * (-e[1]) - a[i][1] * (-e[0])) / denom
            s = (dirs[:, 0] * a[i][1] - dirs[:, 1] * a[i][0]) / denom
        hit = (np.abs(denom) > 1e-300) & (r > 0) & (s >= -1e-12) & (s <= 1 + 1e-12)
        radii = np.where(hit, np.minimum(radii, np.where(hit, r, np.inf)), radii)
    return radii
