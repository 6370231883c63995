"""Point-cloud and mesh file formats: ASCII PCD / PLY / xyz loading, and
OBJ / PLY / STL mesh export plus OBJ / PLY mesh import for comparisons.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .errors import EmptyInputError, FileFormatError
from .meshing import TriMesh

CLOUD_FORMATS = ("pcd-ascii", "ply", "xyz")
MESH_FORMATS = ("obj", "ply", "stl")


@dataclass(frozen=True)
class LoadedCloud:
    """A parsed cloud plus the number of invalid (NaN/short) rows dropped."""

    cloud: PointCloud
    dropped: int


def _infer_cloud_format(path):
    ext = os.path.splitext(path)[1].lower()
    return {".pcd": "pcd-ascii", ".ply": "ply", ".xyz": "xyz",
            ".txt": "xyz"}.get(ext)


def load_cloud(path, format=None) -> LoadedCloud:
    """Load a point cloud, dropping non-finite points."""
    fmt = format or _infer_cloud_format(path)
    if fmt not in CLOUD_FORMATS:
        raise FileFormatError(f"unsupported cloud format {fmt!r}")
    with open(path, "r", errors="replace") as f:
        lines = f.read().splitlines()
    name = os.path.splitext(os.path.basename(path))[0]
    if fmt == "xyz":
        rows, dropped = _parse_xyz_rows(lines, 0)
    elif fmt == "pcd-ascii":
        rows, dropped = _parse_pcd(lines)
    else:
        rows, dropped = _parse_ply_vertices(lines)
    pts = np.array(rows, dtype=float).reshape(-1, 3)
    return LoadedCloud(PointCloud(pts, name=name), dropped)


def _parse_xyz_rows(lines, start_line, count=None):
    rows = []
    dropped = 0
    taken = 0
    for i, raw in enumerate(lines[start_line:], start=start_line + 1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if count is not None and taken >= count:
            break
        taken += 1
        parts = text.split()
        if len(parts) < 3:
            dropped += 1
            continue
        try:
            x, y, z = (float(parts[k]) for k in range(3))
        except ValueError:
            raise FileFormatError(f"line {i}: cannot parse coordinates") from None
        if np.isfinite([x, y, z]).all():
            rows.append((x, y, z))
        else:
            dropped += 1
    if count is not None and taken < count:
        raise FileFormatError(
            f"expected {count} data rows, file ends after {taken}")
    return rows, dropped


def _parse_pcd(lines):
    header = {}
    data_start = None
    for i, raw in enumerate(lines):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        key = parts[0].upper()
        if key == "DATA":
            if len(parts) < 2 or parts[1].lower() != "ascii":
                raise FileFormatError(
                    f"line {i + 1}: only DATA ascii is supported")
            data_start = i + 1
            break
        header[key] = parts[1:]
    if data_start is None:
        raise FileFormatError("truncated PCD header: no DATA line")
    for req in ("FIELDS", "POINTS"):
        if req not in header:
            raise FileFormatError(f"truncated PCD header: missing {req}")
    fields = [f.lower() for f in header["FIELDS"]]
    try:
        idx = [fields.index(ax) for ax in ("x", "y", "z")]
    except ValueError:
        raise FileFormatError("PCD file lacks x/y/z fields") from None
    try:
        n_points = int(header["POINTS"][0])
    except (ValueError, IndexError):
        raise FileFormatError("invalid POINTS count in PCD header") from None

    rows = []
    dropped = 0
    taken = 0
    for i, raw in enumerate(lines[data_start:], start=data_start + 1):
        text = raw.strip()
        if not text:
            continue
        if taken >= n_points:
            break
        taken += 1
        parts = text.split()
        if len(parts) < len(fields):
            dropped += 1
            continue
        try:
            xyz = [float(parts[k]) for k in idx]
        except ValueError:
            raise FileFormatError(f"line {i}: cannot parse coordinates") from None
        if np.isfinite(xyz).all():
            rows.append(tuple(xyz))
        else:
            dropped += 1
    if taken < n_points:
        raise FileFormatError(
            f"PCD declares {n_points} points, file ends after {taken}")
    return rows, dropped


def _parse_ply_header(lines):
    if not lines or lines[0].strip() != "ply":
        raise FileFormatError("not a PLY file (missing 'ply' magic)")
    elements = []            # (name, count, [property names])
    i = 1
    fmt_seen = False
    while i < len(lines):
        parts = lines[i].strip().split()
        i += 1
        if not parts or parts[0] == "comment":
            continue
        if parts[0] == "format":
            if len(parts) < 2 or parts[1] != "ascii":
                raise FileFormatError("only ascii PLY is supported")
            fmt_seen = True
        elif parts[0] == "element":
            elements.append([parts[1], int(parts[2]), []])
        elif parts[0] == "property":
            if not elements:
                raise FileFormatError("PLY property before any element")
            elements[-1][2].append(parts[-1])
        elif parts[0] == "end_header":
            if not fmt_seen:
                raise FileFormatError("truncated PLY header: no format line")
            return elements, i
    raise FileFormatError("truncated PLY header: no end_header")


def _parse_ply_vertices(lines):
    elements, body = _parse_ply_header(lines)
    rows = []
    dropped = 0
    cursor = body
    for name, count, props in elements:
        if name != "vertex":
            cursor += count
            continue
        try:
            idx = [props.index(ax) for ax in ("x", "y", "z")]
        except ValueError:
            raise FileFormatError("PLY vertex element lacks x/y/z") from None
        for k in range(count):
            if cursor + k >= len(lines):
                raise FileFormatError(
                    f"PLY declares {count} vertices, file ends early")
            parts = lines[cursor + k].split()
            try:
                xyz = [float(parts[j]) for j in idx]
            except (ValueError, IndexError):
                raise FileFormatError(
                    f"line {cursor + k + 1}: cannot parse vertex") from None
            if np.isfinite(xyz).all():
                rows.append(tuple(xyz))
            else:
                dropped += 1
        cursor += count
    return rows, dropped


# ---------------------------------------------------------------------------
# Mesh export / import

def _fmt(x):
    return format(float(x), ".17g")


def _infer_mesh_format(path):
    return os.path.splitext(path)[1].lower().lstrip(".")


def export_mesh(mesh: TriMesh, path, format=None):
    fmt = format or _infer_mesh_format(path)
    if fmt not in MESH_FORMATS:
        raise FileFormatError(f"unsupported mesh format {fmt!r}")
    v, t = mesh.vertices, mesh.triangles
    out = []
    if fmt == "obj":
        for p in v:
            out.append(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
        for tri in t:
            out.append(f"f {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}")
    elif fmt == "ply":
        out += ["ply", "format ascii 1.0",
                f"element vertex {len(v)}",
                "property double x", "property double y", "property double z",
                f"element face {len(t)}",
                "property list uchar int vertex_indices", "end_header"]
        for p in v:
            out.append(f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
        for tri in t:
            out.append(f"3 {tri[0]} {tri[1]} {tri[2]}")
    else:   # stl (ascii)
        out.append(f"solid {mesh.label}")
        for tri in t:
            a, b, c = v[tri[0]], v[tri[1]], v[tri[2]]
            n = np.cross(b - a, c - a)
            norm = np.linalg.norm(n)
            n = n / norm if norm > 0 else np.zeros(3)
            out.append(f"  facet normal {_fmt(n[0])} {_fmt(n[1])} {_fmt(n[2])}")
            out.append("    outer loop")
            for p in (a, b, c):
                out.append(f"      vertex {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
            out.append("    endloop")
            out.append("  endfacet")
        out.append(f"endsolid {mesh.label}")
    with open(path, "w") as f:
        f.write("\n".join(out) + "\n")


def load_mesh(path, format=None) -> TriMesh:
    """Import an OBJ or ascii-PLY triangle mesh."""
    fmt = format or _infer_mesh_format(path)
    with open(path, "r", errors="replace") as f:
        lines = f.read().splitlines()
    if fmt == "obj":
        verts, tris = [], []
        for i, raw in enumerate(lines, start=1):
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == "v":
                try:
                    verts.append([float(x) for x in parts[1:4]])
                except ValueError:
                    raise FileFormatError(f"line {i}: bad vertex") from None
            elif parts[0] == "f":
                try:
                    idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                except ValueError:
                    raise FileFormatError(f"line {i}: bad face") from None
                for k in range(1, len(idx) - 1):
                    tris.append([idx[0], idx[k], idx[k + 1]])
        if not verts:
            raise EmptyInputError("OBJ file has no vertices")
        return TriMesh(np.array(verts), np.array(tris, dtype=np.int64))
    if fmt == "ply":
        elements, body = _parse_ply_header(lines)
        verts, tris = [], []
        cursor = body
        for name, count, props in elements:
            if name == "vertex":
                idx = [props.index(ax) for ax in ("x", "y", "z")]
                for k in range(count):
                    parts = lines[cursor + k].split()
                    verts.append([float(parts[j]) for j in idx])
            elif name == "face":
                for k in range(count):
                    parts = lines[cursor + k].split()
                    n = int(parts[0])
                    face = [int(p) for p in parts[1:1 + n]]
                    for j in range(1, n - 1):
                        tris.append([face[0], face[j], face[j + 1]])
            cursor += count
        return TriMesh(np.array(verts), np.array(tris, dtype=np.int64))
    raise FileFormatError(f"unsupported mesh import format {fmt!r}")
