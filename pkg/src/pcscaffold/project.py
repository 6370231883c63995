"""Project documents, versioned JSON persistence, the operation registry
shared by the CLI / HTTP service, and session logs with exact replay.

Numbers are serialized with Python's shortest-round-trip float repr, which
reproduces every IEEE-754 double bit-for-bit on load.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import scaffold as sc
from .cloud import PointCloud
from .errors import (
    FileFormatError,
    InvalidOperationError,
    VersionError,
)
from .geometry import OrientedBoundingBox, Pose, SlicePlane
from .grasp import GraspAnnotation, WaypointPath
from .metrics import ShapeErrorReport
from .scaffold import PartAssembly, Scaffold, Slice
from .selection import paint_cloud

SCHEMA_VERSION = "1"


def default_seed() -> int:
    """Default RNG seed, overridable through the SCAFFOLD_SEED env var."""
    try:
        return int(os.environ.get("SCAFFOLD_SEED", "0"))
    except ValueError:
        return 0


# ---------------------------------------------------------------------------
# Document

@dataclass(frozen=True)
class ItemFlags:
    visible: bool = True
    locked: bool = False


@dataclass(frozen=True)
class ProjectDocument:
    """Everything a modeling session owns.  All maps are name-keyed.

    Invariants: every scaffold's source cloud is one of the document's
    clouds; every grasp/path object reference names an existing assembly
    or cloud.
    """

    clouds: dict = field(default_factory=dict)       # name -> PointCloud
    assemblies: dict = field(default_factory=dict)   # name -> PartAssembly
    grasps: dict = field(default_factory=dict)       # name -> GraspAnnotation
    paths: dict = field(default_factory=dict)        # name -> WaypointPath
    reports: dict = field(default_factory=dict)      # name -> ShapeErrorReport
    flags: dict = field(default_factory=dict)        # name -> ItemFlags
    version: str = SCHEMA_VERSION

    def __post_init__(self):
        if not isinstance(self.version, str) or not self.version:
            raise InvalidOperationError("document version string required")
        for aname, asm in self.assemblies.items():
            for k, part in enumerate(asm.parts):
                if part.cloud is None:
                    continue
                ref = self.clouds.get(part.cloud.name)
                if ref is None or not np.array_equal(ref.points,
                                                     part.cloud.points):
                    raise InvalidOperationError(
                        f"assembly {aname!r} part {k} references cloud "
                        f"{part.cloud.name!r} that is not in the document")
        names = set(self.clouds) | set(self.assemblies)
        for kind, items in (("grasp", self.grasps), ("path", self.paths)):
            for name, item in items.items():
                if item.object_ref and item.object_ref not in names:
                    raise InvalidOperationError(
                        f"{kind} {name!r} references unknown object "
                        f"{item.object_ref!r}")

    def replace(self, **kw) -> "ProjectDocument":
        return dataclasses.replace(self, **kw)


def documents_equal(a: ProjectDocument, b: ProjectDocument) -> bool:
    """Exact field-for-field equality (bitwise on all numbers)."""
    return document_to_dict(a) == document_to_dict(b)


# ---------------------------------------------------------------------------
# JSON encoding

def _arr(a):
    return np.asarray(a, dtype=float).tolist()


def _pose_to_dict(p: Pose):
    return {"position": _arr(p.position), "orientation": _arr(p.orientation)}


def _pose_from_dict(d):
    return Pose(np.array(d["position"]), np.array(d["orientation"]))


def _cloud_to_dict(c: PointCloud):
    return {"points": _arr(c.points),
            "colors": None if c.colors is None else c.colors.tolist(),
            "name": c.name}


def _cloud_from_dict(d):
    pts = np.array(d["points"], dtype=float).reshape(-1, 3)
    colors = None if d["colors"] is None else np.array(d["colors"])
    return PointCloud(pts, colors, d["name"])


def _slice_to_dict(s: Slice):
    return {"pose": _pose_to_dict(s.plane.pose),
            "external_handles": _arr(s.external_handles),
            "hole_handles": None if s.hole_handles is None
            else _arr(s.hole_handles),
            "hole_scale": float(s.hole_scale)}


def _slice_from_dict(d):
    return Slice(SlicePlane(_pose_from_dict(d["pose"])),
                 np.array(d["external_handles"], dtype=float),
                 None if d["hole_handles"] is None
                 else np.array(d["hole_handles"], dtype=float),
                 d["hole_scale"])


def _obb_to_dict(o):
    if o is None:
        return None
    return {"center": _arr(o.center), "axes": _arr(o.axes),
            "half_extents": _arr(o.half_extents)}


def _obb_from_dict(d):
    if d is None:
        return None
    return OrientedBoundingBox(np.array(d["center"]), np.array(d["axes"]),
                               np.array(d["half_extents"]))


def _scaffold_to_dict(s: Scaffold):
    return {"slices": [_slice_to_dict(sl) for sl in s.slices],
            "cloud": None if s.cloud is None else s.cloud.name,
            "name": s.name, "tension": float(s.tension),
            "obb": _obb_to_dict(s.obb), "primitive": s.primitive}


def _scaffold_from_dict(d, clouds):
    cloud = None if d["cloud"] is None else clouds[d["cloud"]]
    return Scaffold(tuple(_slice_from_dict(sd) for sd in d["slices"]),
                    cloud=cloud, name=d["name"], tension=d["tension"],
                    obb=_obb_from_dict(d["obb"]), primitive=d["primitive"])


def _assembly_to_dict(a: PartAssembly):
    return {"parts": [_scaffold_to_dict(p) for p in a.parts], "name": a.name}


def _assembly_from_dict(d, clouds):
    return PartAssembly(tuple(_scaffold_from_dict(p, clouds)
                              for p in d["parts"]), d["name"])


def _grasp_to_dict(g: GraspAnnotation):
    return {"grasp_pose": _pose_to_dict(g.grasp_pose),
            "pre_grasp": _pose_to_dict(g.pre_grasp),
            "frame": g.frame, "object_ref": g.object_ref,
            "labels": dict(g.labels)}


def _grasp_from_dict(d):
    return GraspAnnotation(_pose_from_dict(d["grasp_pose"]),
                           _pose_from_dict(d["pre_grasp"]),
                           d["frame"], d["object_ref"], dict(d["labels"]))


def _path_to_dict(p: WaypointPath):
    return {"poses": [_pose_to_dict(q) for q in p.poses],
            "timestamps": None if p.timestamps is None else list(p.timestamps),
            "object_ref": p.object_ref}


def _path_from_dict(d):
    return WaypointPath(tuple(_pose_from_dict(q) for q in d["poses"]),
                        None if d["timestamps"] is None
                        else tuple(d["timestamps"]),
                        d["object_ref"])


def report_to_dict(r: ShapeErrorReport):
    return dataclasses.asdict(r)


def report_from_dict(d):
    return ShapeErrorReport(**d)


def document_to_dict(doc: ProjectDocument):
    return {
        "version": doc.version,
        "clouds": {k: _cloud_to_dict(v) for k, v in sorted(doc.clouds.items())},
        "assemblies": {k: _assembly_to_dict(v)
                       for k, v in sorted(doc.assemblies.items())},
        "grasps": {k: _grasp_to_dict(v) for k, v in sorted(doc.grasps.items())},
        "paths": {k: _path_to_dict(v) for k, v in sorted(doc.paths.items())},
        "reports": {k: report_to_dict(v)
                    for k, v in sorted(doc.reports.items())},
        "flags": {k: dataclasses.asdict(v)
                  for k, v in sorted(doc.flags.items())},
    }


def document_from_dict(d) -> ProjectDocument:
    version = d.get("version")
    if version != SCHEMA_VERSION:
        raise VersionError(
            f"project version {version!r} is not supported (expected "
            f"{SCHEMA_VERSION!r}); re-save it with a matching release")
    clouds = {k: _cloud_from_dict(v) for k, v in d.get("clouds", {}).items()}
    return ProjectDocument(
        clouds=clouds,
        assemblies={k: _assembly_from_dict(v, clouds)
                    for k, v in d.get("assemblies", {}).items()},
        grasps={k: _grasp_from_dict(v) for k, v in d.get("grasps", {}).items()},
        paths={k: _path_from_dict(v) for k, v in d.get("paths", {}).items()},
        reports={k: report_from_dict(v)
                 for k, v in d.get("reports", {}).items()},
        flags={k: ItemFlags(**v) for k, v in d.get("flags", {}).items()},
        version=version)


def dumps_canonical(data) -> str:
    """Deterministic JSON text: sorted keys, fixed separators, shortest
    exact float reprs."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def save_project(doc: ProjectDocument, path):
    with open(path, "w") as f:
        f.write(dumps_canonical(document_to_dict(doc)))
        f.write("\n")


def load_project(path) -> ProjectDocument:
    with open(path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise FileFormatError(f"line {e.lineno}: invalid project JSON: "
                                  f"{e.msg}") from None
    if not isinstance(data, dict):
        raise FileFormatError("project file must contain a JSON object")
    return document_from_dict(data)


# ---------------------------------------------------------------------------
# Operation registry

_REGISTRY = {}


def registered_operations():
    return sorted(_REGISTRY)


def _register(name):
    def deco(fn):
        _REGISTRY[name] = fn
        return fn
    return deco


def apply_operation(doc: ProjectDocument, op_name: str,
                    params: dict) -> ProjectDocument:
    """Apply one named, JSON-parameterized edit to a document and return
    the new document."""
    if op_name not in _REGISTRY:
        raise InvalidOperationError(f"unknown operation {op_name!r}")
    return _REGISTRY[op_name](doc, dict(params))


def _get_assembly(doc, name):
    if name not in doc.assemblies:
        raise InvalidOperationError(f"unknown assembly {name!r}")
    return doc.assemblies[name]


def _put_part(doc, aname, part_index, new_part):
    asm = _get_assembly(doc, aname)
    if not 0 <= part_index < len(asm.parts):
        raise InvalidOperationError(f"part index {part_index} out of range")
    parts = list(asm.parts)
    parts[part_index] = new_part
    assemblies = dict(doc.assemblies)
    assemblies[aname] = PartAssembly(tuple(parts), asm.name)
    return doc.replace(assemblies=assemblies)


def _scaffold_edit(fn):
    """Wrap a Scaffold -> Scaffold edit as a document operation addressed
    by assembly name + part index."""
    def run(doc, params):
        aname = params.pop("assembly")
        part = int(params.pop("part", 0))
        asm = _get_assembly(doc, aname)
        if not 0 <= part < len(asm.parts):
            raise InvalidOperationError(f"part index {part} out of range")
        new = fn(asm.parts[part], params)
        return _put_part(doc, aname, part, new)
    return run


def _insert(doc, params, pov):
    cloud_name = params["cloud"]
    if cloud_name not in doc.clouds:
        raise InvalidOperationError(f"unknown cloud {cloud_name!r}")
    aname = params["assembly"]
    if aname in doc.assemblies:
        raise InvalidOperationError(f"assembly {aname!r} already exists")
    cloud = doc.clouds[cloud_name]
    kw = dict(primitive=params.get("primitive", "cylinder"),
              n_slices=int(params.get("n_slices", 5)),
              n_handles=int(params.get("n_handles", 8)),
              tension=float(params.get("tension", 0.5)),
              name=aname)
    if pov:
        s = sc.insert_scaffold_pov(cloud, np.array(params["view_direction"],
                                                   dtype=float), **kw)
    else:
        s = sc.insert_scaffold_obb(cloud, **kw)
    assemblies = dict(doc.assemblies)
    assemblies[aname] = PartAssembly((s,), aname)
    return doc.replace(assemblies=assemblies)


@_register("insert_scaffold_obb")
def _op_insert_obb(doc, params):
    return _insert(doc, params, pov=False)


@_register("insert_scaffold_pov")
def _op_insert_pov(doc, params):
    return _insert(doc, params, pov=True)


_register("reverse_sweep")(_scaffold_edit(
    lambda s, p: sc.reverse_sweep(s)))
_register("permute_sweep_axis")(_scaffold_edit(
    lambda s, p: sc.permute_sweep_axis(s, int(p["axis_index"]))))
_register("transform_slice")(_scaffold_edit(
    lambda s, p: sc.transform_slice(
        s, int(p["slice_index"]),
        translation=tuple(p.get("translation", (0.0, 0.0, 0.0))),
        rotation=float(p.get("rotation", 0.0)),
        scale=float(p.get("scale", 1.0)))))
_register("transform_scaffold")(_scaffold_edit(
    lambda s, p: sc.transform_scaffold(
        s, _pose_from_dict(p["delta"]), scale=float(p.get("scale", 1.0)))))
_register("set_slice_spacing_scale")(_scaffold_edit(
    lambda s, p: sc.set_slice_spacing_scale(s, float(p["factor"]))))
_register("insert_slice")(_scaffold_edit(
    lambda s, p: sc.insert_slice(s, float(p["at_parameter"]))))
_register("delete_slice")(_scaffold_edit(
    lambda s, p: sc.delete_slice(s, int(p["index"]))))
_register("move_handle")(_scaffold_edit(
    lambda s, p: sc.move_handle(
        s, int(p["slice_index"]), p.get("kind", sc.EXTERNAL),
        int(p["handle_index"]), np.array(p["new_position"], dtype=float))))
_register("apply_pattern")(_scaffold_edit(
    lambda s, p: sc.apply_pattern(
        s, int(p.pop("slice_index")), p.pop("kind", sc.EXTERNAL),
        p.pop("pattern"),
        **{k: (tuple(v) if isinstance(v, list) else v)
           for k, v in p.items()})))
_register("copy_handles")(_scaffold_edit(
    lambda s, p: sc.copy_handles(
        s, int(p["from_slice"]), int(p["to_slice"]),
        p.get("kind", sc.EXTERNAL))))
_register("add_hole")(_scaffold_edit(
    lambda s, p: sc.add_hole(
        s, [int(i) for i in p["slice_indices"]],
        n_handles=int(p.get("n_handles", 8)),
        initial_radius_fraction=float(p.get("initial_radius_fraction", 0.5)))))
_register("scale_hole")(_scaffold_edit(
    lambda s, p: sc.scale_hole(s, int(p["slice_index"]), float(p["factor"]))))
_register("set_sweep_axis_2d")(_scaffold_edit(
    lambda s, p: sc.set_sweep_axis_2d(
        s, SlicePlane(_pose_from_dict(p["plane"])),
        np.array(p["polyline"], dtype=float))))
_register("shrink_wrap")(_scaffold_edit(
    lambda s, p: sc.shrink_wrap(
        s, None if p.get("slice_indices") is None
        else [int(i) for i in p["slice_indices"]])))


@_register("paint_cloud")
def _op_paint_cloud(doc, params):
    name = params["cloud"]
    if name not in doc.clouds:
        raise InvalidOperationError(f"unknown cloud {name!r}")
    clouds = dict(doc.clouds)
    painted = paint_cloud(clouds[name], params["color"])
    clouds[name] = painted
    # Re-bind scaffolds that source this cloud so the invariant holds.
    assemblies = {}
    for aname, asm in doc.assemblies.items():
        parts = tuple(part.replace(cloud=painted)
                      if part.cloud is not None and part.cloud.name == name
                      else part for part in asm.parts)
        assemblies[aname] = PartAssembly(parts, asm.name)
    return doc.replace(clouds=clouds, assemblies=assemblies)


@_register("add_grasp")
def _op_add_grasp(doc, params):
    grasps = dict(doc.grasps)
    grasps[params["name"]] = _grasp_from_dict(params["grasp"])
    return doc.replace(grasps=grasps)


@_register("record_waypoint")
def _op_record_waypoint(doc, params):
    """Append a waypoint pose to a path, creating the path at its second
    pose (a path needs pre-pose + grasp-pose)."""
    name = params["name"]
    pose = _pose_from_dict(params["pose"])
    paths = dict(doc.paths)
    if name in paths:
        old = paths[name]
        ts = old.timestamps
        if params.get("timestamp") is not None:
            ts = tuple(ts or ()) + (float(params["timestamp"]),)
        paths[name] = WaypointPath(old.poses + (pose,), ts, old.object_ref)
    else:
        pre = _pose_from_dict(params["pre_pose"])
        ts = None
        if params.get("timestamp") is not None:
            ts = (float(params.get("pre_timestamp", params["timestamp"])),
                  float(params["timestamp"]))
        paths[name] = WaypointPath((pre, pose), ts,
                                   params.get("object_ref", ""))
    return doc.replace(paths=paths)


@_register("set_flags")
def _op_set_flags(doc, params):
    flags = dict(doc.flags)
    old = flags.get(params["name"], ItemFlags())
    flags[params["name"]] = ItemFlags(
        visible=bool(params.get("visible", old.visible)),
        locked=bool(params.get("locked", old.locked)))
    return doc.replace(flags=flags)


# ---------------------------------------------------------------------------
# Session log

@dataclass(frozen=True)
class LogRecord:
    timestamp: float
    op: str
    params: dict
    duration: float = 0.0


class SessionLog:
    """Timestamped record of every edit; timestamps are monotonic."""

    def __init__(self, records=()):
        self.records = []
        for r in records:
            self._push(r)

    def _push(self, r: LogRecord):
        if self.records and r.timestamp < self.records[-1].timestamp:
            raise InvalidOperationError("log timestamps must be monotonic")
        self.records.append(r)

    def append(self, op, params, duration=0.0, timestamp=None) -> LogRecord:
        if timestamp is None:
            timestamp = time.time()
            if self.records:
                timestamp = max(timestamp, self.records[-1].timestamp)
        rec = LogRecord(float(timestamp), op, dict(params), float(duration))
        self._push(rec)
        return rec

    @property
    def total_duration(self) -> float:
        return float(sum(r.duration for r in self.records))

    def to_list(self):
        return [dataclasses.asdict(r) for r in self.records]

    @classmethod
    def from_list(cls, data):
        return cls(LogRecord(r["timestamp"], r["op"], dict(r["params"]),
                             r.get("duration", 0.0)) for r in data)


def replay(initial: ProjectDocument, log: SessionLog) -> ProjectDocument:
    """Re-apply every logged operation to the initial document; the result
    is exactly the final document of the session."""
    doc = initial
    for rec in log.records:
        doc = apply_operation(doc, rec.op, rec.params)
    return doc
