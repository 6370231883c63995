"""Bundled deterministic synthetic point clouds for demos and testing."""

from __future__ import annotations

import numpy as np

from .cloud import PointCloud


def cylinder_cloud(radius: float = 0.5, length: float = 2.0,
                   n_rings: int = 60, n_theta: int = 64,
                   caps: bool = True, name: str = "cylinder") -> PointCloud:
    """Noiseless points on the surface of a z-aligned cylinder centered at
    the origin."""
    zs = np.linspace(-length / 2, length / 2, n_rings)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    ring = np.column_stack([radius * np.cos(th), radius * np.sin(th)])
    side = np.concatenate([np.column_stack([ring, np.full(n_theta, z)])
                           for z in zs])
    pts = [side]
    if caps:
        for z in (-length / 2, length / 2):
            for r in np.linspace(radius / 4, radius * 0.75, 3):
                pts.append(np.column_stack([
                    r * np.cos(th), r * np.sin(th), np.full(n_theta, z)]))
    return PointCloud(np.concatenate(pts), name=name)
