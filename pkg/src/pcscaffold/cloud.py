"""Point cloud container used as the tracing substrate for scaffolds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class PointCloud:
    """An immutable set of 3-D points with optional per-point RGB colors.

    Points must be finite; an empty cloud is allowed only for display-only
    use (editing operations reject it).
    """

    points: np.ndarray
    colors: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(pts)):
            raise ValueError("cloud points must be finite")
        object.__setattr__(self, "points", pts)
        if self.colors is not None:
            col = np.asarray(self.colors)
            if col.shape != pts.shape:
                raise ValueError("colors must match points one-to-one")
            object.__setattr__(self, "colors", col.astype(np.uint8))

    def __len__(self):
        return len(self.points)

    @property
    def is_empty(self):
        return len(self.points) == 0

    def painted(self, color) -> "PointCloud":
        """Return a copy with every point set to one RGB color."""
        color = np.asarray(color, dtype=np.uint8)
        if color.shape != (3,):
            raise ValueError("color must be an (r, g, b) triple")
        return PointCloud(self.points, np.tile(color, (len(self.points), 1)),
                          self.name)
