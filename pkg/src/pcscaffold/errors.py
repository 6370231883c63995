"""Typed errors raised across the toolkit.

Every editing or evaluation operation either returns a new value or raises
one of these; inputs are never mutated on failure.
"""


class ScaffoldError(Exception):
    """Base class for all toolkit errors."""


class EmptyInputError(ScaffoldError):
    """An operation received an empty cloud, mesh, or list."""


class InvalidSplineError(ScaffoldError):
    """A closed spline needs at least 3 control points."""


class InvalidOperationError(ScaffoldError):
    """The requested edit would break a structural invariant."""


class UnsupportedOperationError(ScaffoldError):
    """The edit is not applicable to this scaffold (e.g. axis permutation
    on a scaffold that was not inserted from a bounding box)."""


class ContainmentViolationError(ScaffoldError):
    """A hole contour would cross or leave its external contour."""


class MeshingError(ScaffoldError):
    """Mesh construction failed; the message names the offending slice."""


class MeshIntegrityError(ScaffoldError):
    """A mesh that must be watertight is not."""

    def __init__(self, message, boundary_edges=()):
        super().__init__(message)
        self.boundary_edges = list(boundary_edges)


class CollisionError(ScaffoldError):
    """The gripper pose intersects the object before closing."""


class FileFormatError(ScaffoldError):
    """A file could not be parsed; the message carries the line number."""


class VersionError(ScaffoldError):
    """A project file was written by an incompatible format version."""
