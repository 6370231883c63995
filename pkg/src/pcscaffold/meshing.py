"""Swept-surface meshing of scaffolds: skin, hole, difference and final
meshes, plus wireframe/point-cloud views and deterministic surface sampling.

All meshes are built structurally from the sweep topology — ring-to-ring
triangle strips, centroid fan caps, and annulus caps where a hole run
reaches a scaffold end. There is no general CSG.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cloud import PointCloud
from .errors import (
    ContainmentViolationError,
    EmptyInputError,
    MeshingError,
)
from .polygon import points_in_polygon, polygon_is_simple, signed_area
from .scaffold import EXTERNAL, HOLE, PartAssembly, Scaffold, hole_runs, sampled_ring


@dataclass(frozen=True)
class TriMesh:
    """Indexed triangle mesh."""

    vertices: np.ndarray    # (n, 3) float
    triangles: np.ndarray   # (m, 3) int
    label: str = "skin"

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if len(t) and (t.min() < 0 or t.max() >= len(v)):
            raise MeshingError("triangle indices out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def is_empty(self):
        return len(self.triangles) == 0

    def flipped(self) -> "TriMesh":
        return TriMesh(self.vertices, self.triangles[:, [0, 2, 1]], self.label)


@dataclass(frozen=True)
class SurfaceSampleSet:
    """Deterministic area-weighted surface samples of a mesh."""

    points: np.ndarray
    seed: int
    count: int


# ---------------------------------------------------------------------------
# Mesh measurements

def triangle_areas(mesh: TriMesh):
    v = mesh.vertices
    a, b, c = (v[mesh.triangles[:, i]] for i in range(3))
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def surface_area(mesh: TriMesh):
    return float(np.sum(triangle_areas(mesh)))


def signed_volume(mesh: TriMesh):
    """Total signed volume (divergence theorem over triangles)."""
    v = mesh.vertices
    a, b, c = (v[mesh.triangles[:, i]] for i in range(3))
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def _edge_counts(mesh: TriMesh):
    t = mesh.triangles
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    e = np.sort(e, axis=1)
    _, counts = np.unique(e, axis=0, return_counts=True)
    return counts


def boundary_edges(mesh: TriMesh):
    t = mesh.triangles
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    key = np.sort(e, axis=1)
    uniq, counts = np.unique(key, axis=0, return_counts=True)
    return uniq[counts != 2]


def is_watertight(mesh: TriMesh):
    """True when every edge is shared by exactly 2 triangles."""
    if mesh.is_empty:
        return False
    return bool(np.all(_edge_counts(mesh) == 2))


def euler_characteristic(mesh: TriMesh):
    """V − E + F over referenced vertices."""
    used = np.unique(mesh.triangles)
    t = mesh.triangles
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    n_edges = len(np.unique(np.sort(e, axis=1), axis=0))
    return int(len(used) - n_edges + len(t))


def connected_component_count(mesh: TriMesh):
    """Number of connected components among referenced vertices."""
    if mesh.is_empty:
        return 0
    used = np.unique(mesh.triangles)
    index = {int(v): i for i, v in enumerate(used)}
    parent = list(range(len(used)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for tri in mesh.triangles:
        a = find(index[int(tri[0])])
        for v in tri[1:]:
            b = find(index[int(v)])
            parent[b] = a
    return len({find(i) for i in range(len(used))})


def concatenate_meshes(meshes, label=None) -> TriMesh:
    meshes = [m for m in meshes if not m.is_empty]
    if not meshes:
        return TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64),
                       label or "final")
    verts, tris, offset = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        tris.append(m.triangles + offset)
        offset += m.n_vertices
    return TriMesh(np.vstack(verts), np.vstack(tris),
                   label if label is not None else meshes[0].label)


# ---------------------------------------------------------------------------
# Ring construction

def _dedupe_slices(scaffold: Scaffold):
    """Drop literally repeated consecutive slices (zero-length segments)."""
    out = [scaffold.slices[0]]
    for sl in scaffold.slices[1:]:
        prev = out[-1]
        if (np.allclose(sl.center, prev.center, atol=1e-12)
                and np.allclose(sl.plane.pose.orientation,
                                prev.plane.pose.orientation, atol=1e-12)
                and sl.external_handles.shape == prev.external_handles.shape
                and np.allclose(sl.external_handles, prev.external_handles,
                                atol=1e-12)):
            continue
        out.append(sl)
    return out


def _world_rings(slices, kind, tension, samples_per_segment):
    """Sampled contour rings lifted to world space, one (k, 3) per slice."""
    rings = []
    for i, sl in enumerate(slices):
        uv = sampled_ring(sl, kind, tension, samples_per_segment)
        if not polygon_is_simple(uv):
            raise MeshingError(
                f"slice {i}: sampled {kind} contour self-intersects")
        rings.append(sl.plane.to_world(uv))
    return rings


def _strip(tris, oa, ob, k):
    """Triangle strip joining two rings of equal sample count."""
    for j in range(k):
        j1 = (j + 1) % k
        tris.append((oa + j, oa + j1, ob + j))
        tris.append((oa + j1, ob + j1, ob + j))


def _fan(tris, center_idx, ring_offset, k, start):
    """Centroid fan cap; start=True orients it for the first ring."""
    for j in range(k):
        j1 = (j + 1) % k
        if start:
            tris.append((center_idx, ring_offset + j1, ring_offset + j))
        else:
            tris.append((center_idx, ring_offset + j, ring_offset + j1))


def _ring_param(ring):
    """Normalized cumulative arc-length parameter of each ring vertex."""
    seg = np.linalg.norm(np.diff(np.vstack([ring, ring[:1]]), axis=0), axis=1)
    total = max(seg.sum(), 1e-300)
    return np.concatenate([[0.0], np.cumsum(seg[:-1])]) / total


def _annulus(tris, outer_off, outer_ring, hole_off, hole_ring, at_end):
    """Bridge an outer ring to a hole ring, matching vertices by arc-length
    parameter; winding is for a cap at the last slice (at_end=True) or the
    first (False)."""
    ko, kh = len(outer_ring), len(hole_ring)
    po = _ring_param(outer_ring)
    ph = _ring_param(hole_ring)
    i = j = 0
    out = []
    while i < ko or j < kh:
        next_o = po[i + 1] if i + 1 < ko else 1.0
        next_h = ph[j + 1] if j + 1 < kh else 1.0
        oi, oi1 = outer_off + i % ko, outer_off + (i + 1) % ko
        hj, hj1 = hole_off + j % kh, hole_off + (j + 1) % kh
        if (next_o <= next_h and i < ko) or j >= kh:
            out.append((oi, oi1, hj))
            i += 1
        else:
            out.append((oi, hj1, hj))
            j += 1
    if not at_end:
        out = [(a, c, b) for a, b, c in out]
    tris.extend(out)


def _check_hole_between_stations(slices, tension, samples_per_segment, a, b):
    """Validate the hole stays inside the outer contour at the segment
    midpoints of a hole run (sample-resolution check)."""
    for i in range(a, b):
        s0, s1 = slices[i], slices[i + 1]
        for u in (0.5,):
            outer = ((1 - u) * sampled_ring(s0, EXTERNAL, tension, samples_per_segment)
                     + u * sampled_ring(s1, EXTERNAL, tension, samples_per_segment)
                     if s0.external_handles.shape == s1.external_handles.shape
                     else None)
            if outer is None:
                continue
            if s0.hole_handles.shape != s1.hole_handles.shape:
                continue
            hole = ((1 - u) * sampled_ring(s0, HOLE, tension, samples_per_segment)
                    + u * sampled_ring(s1, HOLE, tension, samples_per_segment))
            if not np.all(points_in_polygon(hole, outer)):
                raise ContainmentViolationError(
                    f"hole crosses outside the external contour between "
                    f"slices {i} and {i + 1}")


def _oriented(vertices, tris, label) -> TriMesh:
    mesh = TriMesh(np.asarray(vertices, dtype=float),
                   np.asarray(tris, dtype=np.int64), label)
    if signed_volume(mesh) < 0:
        mesh = mesh.flipped()
    return mesh


# ---------------------------------------------------------------------------
# Mesh operations

def skin_mesh(scaffold: Scaffold, samples_per_segment: int = 8) -> TriMesh:
    """Closed outer swept surface: ring strips plus centroid fan end caps."""
    slices = _dedupe_slices(scaffold)
    if len(slices) < 2:
        raise MeshingError("scaffold collapses to fewer than 2 distinct slices")
    rings = _world_rings(slices, EXTERNAL, scaffold.tension, samples_per_segment)
    return _tube_mesh(rings, cap_start=True, cap_end=True, label="skin")


def _tube_mesh(rings, cap_start, cap_end, label) -> Optional[TriMesh]:
    k = len(rings[0])
    if any(len(r) != k for r in rings):
        raise MeshingError("ring sample counts differ along the sweep")
    verts = list(np.vstack(rings))
    offsets = [i * k for i in range(len(rings))]
    tris = []
    for a in range(len(rings) - 1):
        _strip(tris, offsets[a], offsets[a + 1], k)
    if cap_start:
        verts.append(rings[0].mean(axis=0))
        _fan(tris, len(verts) - 1, offsets[0], k, start=True)
    if cap_end:
        verts.append(rings[-1].mean(axis=0))
        _fan(tris, len(verts) - 1, offsets[-1], k, start=False)
    return _oriented(verts, tris, label)


def hole_mesh(scaffold: Scaffold, samples_per_segment: int = 8) -> TriMesh:
    """Closed tube over each volumetric hole run; empty mesh when none."""
    runs = hole_runs(scaffold)
    parts = []
    for a, b in runs:
        rings = _world_rings(scaffold.slices[a:b + 1], HOLE, scaffold.tension,
                             samples_per_segment)
        parts.append(_tube_mesh(rings, cap_start=True, cap_end=True,
                                label="hole"))
    return concatenate_meshes(parts, label="hole")


def difference_mesh(scaffold: Scaffold, samples_per_segment: int = 8) -> TriMesh:
    """Outer skin minus hole volumes, built structurally: inverted hole
    tubes, annulus caps where a run reaches a scaffold end, fan floors at
    interior run boundaries."""
    slices = _dedupe_slices(scaffold)
    if len(slices) < 2:
        raise MeshingError("scaffold collapses to fewer than 2 distinct slices")
    # Recompute runs on the deduped slice list.
    runs = []
    start = None
    for i, sl in enumerate(slices):
        if sl.has_hole and start is None:
            start = i
        elif not sl.has_hole and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(slices) - 1))
    runs = [(a, b) for a, b in runs if b > a]

    rings = _world_rings(slices, EXTERNAL, scaffold.tension, samples_per_segment)
    if not runs:
        return TriMesh(*_as_arrays(skin_mesh(scaffold, samples_per_segment)),
                       label="difference")

    for a, b in runs:
        _check_hole_between_stations(slices, scaffold.tension,
                                     samples_per_segment, a, b)

    n = len(slices)
    k = len(rings[0])
    open_start = any(a == 0 for a, b in runs)
    open_end = any(b == n - 1 for a, b in runs)

    verts = list(np.vstack(rings))
    offsets = [i * k for i in range(n)]
    tris = []
    for i in range(n - 1):
        _strip(tris, offsets[i], offsets[i + 1], k)
    if not open_start:
        verts.append(rings[0].mean(axis=0))
        _fan(tris, len(verts) - 1, offsets[0], k, start=True)
    if not open_end:
        verts.append(rings[-1].mean(axis=0))
        _fan(tris, len(verts) - 1, offsets[-1], k, start=False)

    for a, b in runs:
        hrings = _world_rings(slices[a:b + 1], HOLE, scaffold.tension,
                              samples_per_segment)
        kh = len(hrings[0])
        hoff = [len(verts) + i * kh for i in range(len(hrings))]
        verts.extend(np.vstack(hrings))
        tube = []
        for i in range(len(hrings) - 1):
            _strip(tube, hoff[i], hoff[i + 1], kh)
        if a != 0:
            verts.append(hrings[0].mean(axis=0))
            _fan(tube, len(verts) - 1, hoff[0], kh, start=True)
        if b != n - 1:
            verts.append(hrings[-1].mean(axis=0))
            _fan(tube, len(verts) - 1, hoff[-1], kh, start=False)
        # Invert the tube: its normals face the removed volume.
        tris.extend((t[0], t[2], t[1]) for t in tube)
        if a == 0:
            _annulus(tris, offsets[0], rings[0], hoff[0], hrings[0],
                     at_end=False)
        if b == n - 1:
            _annulus(tris, offsets[-1], rings[-1], hoff[-1], hrings[-1],
                     at_end=True)

    return _oriented(verts, tris, "difference")


def _as_arrays(mesh: TriMesh):
    return mesh.vertices, mesh.triangles


def final_mesh(assembly: PartAssembly, samples_per_segment: int = 8) -> TriMesh:
    """Union-by-concatenation of each part's difference mesh."""
    parts = []
    for idx, part in enumerate(assembly.parts):
        try:
            parts.append(difference_mesh(part, samples_per_segment))
        except Exception as e:
            name = part.name or f"part {idx}"
            raise type(e)(f"{name}: {e}") from e
    return concatenate_meshes(parts, label="final")


# ---------------------------------------------------------------------------
# Views and sampling

def wireframe_view(scaffold: Scaffold):
    """Edge segments: handle contour rings plus inter-slice connectors;
    returns an (E, 2, 3) array."""
    edges = []
    world_ext = [sl.plane.to_world(sl.external_handles) for sl in scaffold.slices]
    for ring in world_ext:
        for j in range(len(ring)):
            edges.append((ring[j], ring[(j + 1) % len(ring)]))
    for a in range(len(world_ext) - 1):
        ra, rb = world_ext[a], world_ext[a + 1]
        if len(ra) == len(rb):
            for j in range(len(ra)):
                edges.append((ra[j], rb[j]))
    for sl in scaffold.slices:
        if sl.has_hole:
            ring = sl.plane.to_world(sl.hole_handles)
            for j in range(len(ring)):
                edges.append((ring[j], ring[(j + 1) % len(ring)]))
    for a, b in hole_runs(scaffold):
        for i in range(a, b):
            ra = scaffold.slices[i].plane.to_world(scaffold.slices[i].hole_handles)
            rb = scaffold.slices[i + 1].plane.to_world(
                scaffold.slices[i + 1].hole_handles)
            if len(ra) == len(rb):
                for j in range(len(ra)):
                    edges.append((ra[j], rb[j]))
    return np.asarray(edges, dtype=float)


def sample_surface(mesh: TriMesh, count: int, seed: int = 0) -> SurfaceSampleSet:
    """Area-weighted uniform surface samples, deterministic per seed."""
    if mesh.is_empty:
        raise EmptyInputError("cannot sample an empty mesh")
    if count <= 0:
        raise EmptyInputError("sample count must be positive")
    areas = triangle_areas(mesh)
    total = areas.sum()
    if total <= 0:
        raise MeshingError("mesh has zero surface area")
    rng = np.random.default_rng(seed)
    tri_idx = rng.choice(len(areas), size=count, p=areas / total)
    v = mesh.vertices
    a = v[mesh.triangles[tri_idx, 0]]
    b = v[mesh.triangles[tri_idx, 1]]
    c = v[mesh.triangles[tri_idx, 2]]
    r1 = np.sqrt(rng.random(count))[:, None]
    r2 = rng.random(count)[:, None]
    pts = (1 - r1) * a + r1 * (1 - r2) * b + r1 * r2 * c
    return SurfaceSampleSet(pts, seed=seed, count=count)


def cloud_view(mesh: TriMesh, density: int, seed: int = 0) -> PointCloud:
    """Point-cloud visualization of a mesh: ``density`` surface samples."""
    if density <= 0:
        return PointCloud(np.zeros((0, 3)))
    return PointCloud(sample_surface(mesh, density, seed).points)
