"""Mass properties from exact polyhedral integrals, shape-error metrics
(direct, relative, Hausdorff), modeling efficiency, and prototype-scaffold
merging.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyInputError, InvalidOperationError, MeshIntegrityError
from .geometry import (
    Pose,
    normalized,
    plane_from_center_normal,
    quat_multiply,
    quat_normalize,
    quat_rotation_between,
)
from .meshing import (
    SurfaceSampleSet,
    TriMesh,
    boundary_edges,
    is_watertight,
    sample_surface,
    surface_area,
)
from .scaffold import Scaffold, Slice, _resample_ring, _slerp

# ∫ x x^T over the standard simplex {x,y,z >= 0, x+y+z <= 1}.
_SIMPLEX_SECOND_MOMENT = np.full((3, 3), 1.0 / 120.0) + np.eye(3) / 120.0


@dataclass(frozen=True)
class MassProperties:
    """Unit-density integral properties of a closed mesh."""

    volume: float
    com: np.ndarray
    inertia: np.ndarray          # 3x3 about COM, world axes
    lambda_max: float
    diag_bb: float
    surface_area: float


def _require_watertight(mesh: TriMesh, what="mesh"):
    if not is_watertight(mesh):
        edges = boundary_edges(mesh)
        raise MeshIntegrityError(
            f"{what} is not watertight ({len(edges)} boundary edges)",
            boundary_edges=[tuple(int(x) for x in e) for e in edges[:32]])


def mass_properties(mesh: TriMesh) -> MassProperties:
    """Exact polyhedral volume, COM and inertia via signed tetrahedra
    against the origin."""
    _require_watertight(mesh)
    v = mesh.vertices
    a = v[mesh.triangles[:, 0]]
    b = v[mesh.triangles[:, 1]]
    c = v[mesh.triangles[:, 2]]

    det = np.einsum("ij,ij->i", a, np.cross(b, c))     # 6 * signed tet volume
    volume = float(det.sum() / 6.0)
    if volume <= 0:
        raise MeshIntegrityError("mesh must be outward-oriented (volume <= 0)")
    first = (det[:, None] * (a + b + c)).sum(axis=0) / 24.0
    com = first / volume

    # Second moments: sum over tets of det(T) * T * C * T^T with
    # T = [a b c] columns and C the simplex second-moment matrix.
    T = np.stack([a, b, c], axis=2)                     # (m, 3, 3), columns
    P = np.einsum("n,nik,kl,njl->ij", det, T, _SIMPLEX_SECOND_MOMENT, T)
    inertia_origin = np.trace(P) * np.eye(3) - P
    # Parallel axis: move to the COM.
    r = com
    inertia = inertia_origin - volume * ((r @ r) * np.eye(3) - np.outer(r, r))
    inertia = (inertia + inertia.T) / 2.0

    lo, hi = v.min(axis=0), v.max(axis=0)
    diag_bb = float(np.linalg.norm(hi - lo))
    lam = float(np.linalg.eigvalsh(inertia)[-1])
    return MassProperties(volume=volume, com=com, inertia=inertia,
                          lambda_max=lam, diag_bb=diag_bb,
                          surface_area=surface_area(mesh))


# ---------------------------------------------------------------------------
# Hausdorff metrics

def _as_points(x):
    pts = x.points if isinstance(x, (SurfaceSampleSet,)) else np.asarray(x, float)
    pts = np.atleast_2d(pts)
    if len(pts) == 0:
        raise EmptyInputError("point set is empty")
    return pts


def hausdorff(a, b):
    """(hd, mean_hd): symmetric Hausdorff and mean Hausdorff distance
    between two sample sets."""
    pa, pb = _as_points(a), _as_points(b)
    d_ab = cKDTree(pb).query(pa, workers=-1)[0]
    d_ba = cKDTree(pa).query(pb, workers=-1)[0]
    hd = float(max(d_ab.max(), d_ba.max()))
    mean_hd = float(max(d_ab.mean(), d_ba.mean()))
    return hd, mean_hd


# ---------------------------------------------------------------------------
# Shape-error report

@dataclass(frozen=True)
class ShapeErrorReport:
    """All direct and relative error metrics between an ideal and a subject
    mesh. Signed errors are ideal minus subject."""

    com_e: float
    s_e: float
    v_e: float
    it_e: float                  # Frobenius norm of the tensor difference
    it_e_spectral: float         # spectral-norm alternative
    hd: float
    mean_hd: float
    r_com_e: float
    r_s_e: float
    r_v_e: float
    r_it_e: float
    r_mu_h: float
    sample_count: int
    seed: int
    it_norm: str = "frobenius"
    duration: Optional[float] = None
    efficiency: Optional[float] = None


def efficiency_from(r_mu_h: float, duration: float) -> float:
    """Modeling efficiency: (1 - r_mu_h) / duration."""
    if duration <= 0:
        raise InvalidOperationError("duration must be positive")
    return (1.0 - r_mu_h) / duration


def shape_errors(ideal: TriMesh, subject: TriMesh, sample_count: int = 50_000,
                 seed: int = 0, duration: Optional[float] = None
                 ) -> ShapeErrorReport:
    """Compare a subject mesh against the ideal mesh."""
    if sample_count < 1000:
        raise InvalidOperationError("sample_count must be >= 1000")
    _require_watertight(ideal, "ideal mesh")
    _require_watertight(subject, "subject mesh")
    mi = mass_properties(ideal)
    ms = mass_properties(subject)
    if mi.diag_bb <= 0:
        raise InvalidOperationError("ideal mesh has zero bounding-box diagonal")

    com_e = float(np.linalg.norm(mi.com - ms.com))
    s_e = mi.surface_area - ms.surface_area
    v_e = mi.volume - ms.volume
    diff = mi.inertia - ms.inertia
    it_e = float(np.linalg.norm(diff))
    it_e_spectral = float(np.linalg.norm(diff, ord=2))

    # Both meshes are sampled with the same seed so that comparing a mesh
    # against itself yields exactly zero distances.
    sa = sample_surface(ideal, sample_count, seed)
    sb = sample_surface(subject, sample_count, seed)
    hd, mean_hd = hausdorff(sa, sb)

    r_mu_h = mean_hd / mi.diag_bb
    eff = efficiency_from(r_mu_h, duration) if duration is not None else None
    return ShapeErrorReport(
        com_e=com_e, s_e=s_e, v_e=v_e, it_e=it_e, it_e_spectral=it_e_spectral,
        hd=hd, mean_hd=mean_hd,
        r_com_e=com_e / mi.diag_bb,
        r_s_e=abs(s_e) / mi.surface_area,
        r_v_e=abs(v_e) / mi.volume,
        r_it_e=it_e / mi.lambda_max,
        r_mu_h=r_mu_h,
        sample_count=sample_count, seed=seed,
        duration=duration, efficiency=eff)


# ---------------------------------------------------------------------------
# Part-overlap detection (sample based)

def points_in_mesh(points, mesh: TriMesh, eps=1e-12):
    """Even-odd ray cast along +z for each query point."""
    pts = np.atleast_2d(np.asarray(points, float))
    v = mesh.vertices
    a = v[mesh.triangles[:, 0]]
    b = v[mesh.triangles[:, 1]]
    c = v[mesh.triangles[:, 2]]
    inside = np.zeros(len(pts), dtype=bool)
    # 2-D barycentric test in the xy plane, then z comparison.
    d00 = b[:, :2] - a[:, :2]
    d01 = c[:, :2] - a[:, :2]
    denom = d00[:, 0] * d01[:, 1] - d00[:, 1] * d01[:, 0]
    ok = np.abs(denom) > eps
    for i in np.flatnonzero(ok):
        rel = pts[:, :2] - a[i, :2]
        u = (rel[:, 0] * d01[i, 1] - rel[:, 1] * d01[i, 0]) / denom[i]
        w = (d00[i, 0] * rel[:, 1] - d00[i, 1] * rel[:, 0]) / denom[i]
        hit = (u >= 0) & (w >= 0) & (u + w <= 1)
        if not np.any(hit):
            continue
        z = a[i, 2] + u[hit] * (b[i, 2] - a[i, 2]) + w[hit] * (c[i, 2] - a[i, 2])
        above = z > pts[hit, 2]
        flip = np.zeros(len(pts), dtype=bool)
        flip[np.flatnonzero(hit)[above]] = True
        inside ^= flip
    return inside


def parts_overlap(mesh_a: TriMesh, mesh_b: TriMesh, samples=2000, seed=0):
    """Sample-based intersection test between two closed part meshes."""
    sa = sample_surface(mesh_a, samples, seed).points
    sb = sample_surface(mesh_b, samples, seed + 1).points
    return bool(np.any(points_in_mesh(sa, mesh_b))
                or np.any(points_in_mesh(sb, mesh_a)))


# ---------------------------------------------------------------------------
# Prototype scaffold merging

def _resample_scaffold(s: Scaffold, target_slices: int, target_handles: int):
    """Uniform arc-length stations along the sweep; returns per-station
    (center, orientation, external ring, hole ring or None)."""
    centers = s.sweep_axis
    seg = np.linalg.norm(np.diff(centers, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    stations = np.linspace(0.0, total, target_slices)
    out = []
    for st in stations:
        i = int(np.clip(np.searchsorted(cum, st, side="right") - 1, 0,
                        len(seg) - 1))
        u = 0.0 if seg[i] == 0 else (st - cum[i]) / seg[i]
        u = float(np.clip(u, 0.0, 1.0))
        a, b = s.slices[i], s.slices[i + 1]
        pos = (1 - u) * a.center + u * b.center
        q = _slerp(a.plane.pose.orientation, b.plane.pose.orientation, u)
        ext = ((1 - u) * _resample_ring(a.external_handles, target_handles, s.tension)
               + u * _resample_ring(b.external_handles, target_handles, s.tension))
        hole = None
        if a.has_hole and b.has_hole:
            hole = ((1 - u) * _resample_ring(a.hole_handles, target_handles, s.tension)
                    + u * _resample_ring(b.hole_handles, target_handles, s.tension))
        elif u == 0.0 and a.has_hole:
            hole = _resample_ring(a.hole_handles, target_handles, s.tension)
        elif u == 1.0 and b.has_hole:
            hole = _resample_ring(b.hole_handles, target_handles, s.tension)
        out.append((pos, q, ext, hole))
    return out


def _endpoint_alignment(ref_stations, stations, allow_scale):
    """Similarity transform (scale, Pose) aligning a scaffold's sweep
    endpoints onto the reference's: translation of the midpoint, minimal
    rotation of the end-to-end direction, optional uniform scale."""
    r0, r1 = ref_stations[0][0], ref_stations[-1][0]
    s0, s1 = stations[0][0], stations[-1][0]
    dr, ds = r1 - r0, s1 - s0
    lr, ls = np.linalg.norm(dr), np.linalg.norm(ds)
    scale = (lr / ls) if (allow_scale and ls > 1e-12 and lr > 1e-12) else 1.0
    if lr > 1e-12 and ls > 1e-12:
        q = quat_rotation_between(ds, dr)
    else:
        q = np.array([1.0, 0.0, 0.0, 0.0])
    mid_r = (r0 + r1) / 2.0
    mid_s = (s0 + s1) / 2.0
    pose = Pose(np.zeros(3), q)
    offset = mid_r - pose.rotate(scale * mid_s)
    return scale, Pose(offset, q)


def prototype_scaffold(scaffolds, target_slices: int, target_handles: int,
                       align_scale: bool = False) -> Scaffold:
    """Mean shape of several scaffolds of the same part: resample, align by
    sweep endpoints, average stations; holes follow a strict majority."""
    scaffolds = list(scaffolds)
    if not scaffolds:
        raise EmptyInputError("no scaffolds to merge")
    if len(scaffolds) < 2:
        raise InvalidOperationError("prototype merging needs >= 2 scaffolds")
    if target_slices < 2 or target_handles < 3:
        raise InvalidOperationError(
            "need >= 2 target slices and >= 3 target handles")

    all_stations = [_resample_scaffold(s, target_slices, target_handles)
                    for s in scaffolds]
    ref = all_stations[0]
    aligned = [ref]
    for stations in all_stations[1:]:
        scale, pose = _endpoint_alignment(ref, stations, align_scale)
        moved = []
        for pos, q, ext, hole in stations:
            moved.append((pose.transform(scale * pos),
                          quat_normalize(quat_multiply(pose.orientation, q)),
                          ext * scale,
                          None if hole is None else hole * scale))
        aligned.append(moved)

    n = len(scaffolds)
    slices = []
    for k in range(target_slices):
        centers = np.array([st[k][0] for st in aligned])
        normals = np.array([Pose(np.zeros(3), st[k][1]).rotate([0.0, 0.0, 1.0])
                            for st in aligned])
        exts = np.array([st[k][2] for st in aligned])
        mean_center = centers.mean(axis=0)
        mean_normal = normalized(normals.mean(axis=0))
        holes = [st[k][3] for st in aligned if st[k][3] is not None]
        hole = (np.mean(holes, axis=0) if len(holes) * 2 > n else None)
        plane = plane_from_center_normal(mean_center, mean_normal)
        slices.append(Slice(plane, exts.mean(axis=0), hole))
    return Scaffold(tuple(slices), tension=scaffolds[0].tension,
                    name="prototype")
