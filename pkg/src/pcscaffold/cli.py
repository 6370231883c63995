"""Batch command-line interface.

Every command exits nonzero with a typed error name on failure; reports
are emitted as deterministic JSON (identical inputs + seeds give
byte-identical output).
"""

from __future__ import annotations

import functools
import sys

import click
import numpy as np

from . import scaffold as sc
from .errors import ScaffoldError
from .formats import export_mesh, load_cloud, load_mesh
from .grasp import ribbon_area
from .meshing import difference_mesh, final_mesh, hole_mesh, skin_mesh
from .metrics import mass_properties, prototype_scaffold, shape_errors
from .project import (
    ProjectDocument,
    default_seed,
    dumps_canonical,
    load_project,
    report_to_dict,
    save_project,
)
from .scaffold import PartAssembly

MESH_BUILDERS = {"skin": skin_mesh, "hole": hole_mesh,
                 "difference": difference_mesh}


def _typed_errors(fn):
    """Print `ErrorType: message` on stderr and exit 1 on any domain or
    I/O failure."""
    @functools.wraps(fn)
    def wrapper(*a, **kw):
        try:
            return fn(*a, **kw)
        except (ScaffoldError, OSError, ValueError) as e:
            click.echo(f"{type(e).__name__}: {e}", err=True)
            sys.exit(1)
    return wrapper


def _emit(text: str, out):
    if out:
        with open(out, "w") as f:
            f.write(text + "\n")
    else:
        click.echo(text)


def _parse_vec3(text):
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise ScaffoldError(f"expected x,y,z — got {text!r}")
    return np.array(parts)


def _single_part(doc, assembly, part):
    if assembly is None:
        if len(doc.assemblies) != 1:
            raise ScaffoldError(
                "document has several assemblies; pass --assembly")
        assembly = next(iter(doc.assemblies))
    if assembly not in doc.assemblies:
        raise ScaffoldError(f"unknown assembly {assembly!r}")
    asm = doc.assemblies[assembly]
    if not 0 <= part < len(asm.parts):
        raise ScaffoldError(f"part index {part} out of range")
    return assembly, asm


@click.group()
def main():
    """Point-cloud scaffold modeling toolkit."""


@main.command()
@click.argument("cloud_path", type=click.Path(exists=True))
@click.argument("out", type=click.Path())
@click.option("--mode", type=click.Choice(["obb", "pov"]), default="obb")
@click.option("--view-direction", default=None,
              help="x,y,z sweep direction (pov mode)")
@click.option("--primitive", type=click.Choice(["cylinder", "box"]),
              default="cylinder")
@click.option("--slices", "n_slices", default=5, show_default=True)
@click.option("--handles", "n_handles", default=8, show_default=True)
@click.option("--name", default="scaffold", show_default=True)
@_typed_errors
def insert(cloud_path, out, mode, view_direction, primitive, n_slices,
           n_handles, name):
    """Insert a scaffold over a point-cloud file and save a project."""
    loaded = load_cloud(cloud_path)
    if loaded.dropped:
        click.echo(f"dropped {loaded.dropped} invalid points", err=True)
    cloud = loaded.cloud
    if mode == "pov":
        if view_direction is None:
            raise ScaffoldError("pov mode needs --view-direction x,y,z")
        s = sc.insert_scaffold_pov(cloud, _parse_vec3(view_direction),
                                   primitive, n_slices, n_handles, name=name)
    else:
        s = sc.insert_scaffold_obb(cloud, primitive, n_slices, n_handles,
                                   name=name)
    doc = ProjectDocument(clouds={cloud.name: cloud},
                          assemblies={name: PartAssembly((s,), name)})
    save_project(doc, out)
    click.echo(f"inserted {name}: {s.n_slices} slices over "
               f"{len(cloud)} points -> {out}")


@main.command()
@click.argument("project", type=click.Path(exists=True))
@click.option("--assembly", default=None)
@click.option("--part", default=0, show_default=True)
@click.option("--slices", "slice_indices", default=None,
              help="comma-separated slice indices (default: all)")
@click.option("-o", "--out", type=click.Path(), default=None,
              help="output project (default: in place)")
@_typed_errors
def shrinkwrap(project, assembly, part, slice_indices, out):
    """Snap scaffold handles onto the underlying cloud."""
    doc = load_project(project)
    aname, asm = _single_part(doc, assembly, part)
    idx = (None if slice_indices is None
           else [int(i) for i in slice_indices.split(",")])
    warnings = []
    new = sc.shrink_wrap(asm.parts[part], idx, on_warning=warnings.append)
    for w in warnings:
        click.echo(w, err=True)
    parts = list(asm.parts)
    parts[part] = new
    assemblies = dict(doc.assemblies)
    assemblies[aname] = PartAssembly(tuple(parts), asm.name)
    save_project(doc.replace(assemblies=assemblies), out or project)
    click.echo(f"shrink-wrapped {aname} -> {out or project}")


@main.command()
@click.argument("project", type=click.Path(exists=True))
@click.argument("out", type=click.Path())
@click.option("--assembly", default=None)
@click.option("--part", default=0, show_default=True)
@click.option("--kind", type=click.Choice(["skin", "hole", "difference",
                                           "final"]),
              default="final", show_default=True)
@click.option("--samples-per-segment", default=8, show_default=True)
@_typed_errors
def mesh(project, out, assembly, part, kind, samples_per_segment):
    """Mesh a scaffold (or assembly) and export OBJ/PLY/STL."""
    doc = load_project(project)
    aname, asm = _single_part(doc, assembly, part)
    if kind == "final":
        m = final_mesh(asm, samples_per_segment)
    else:
        m = MESH_BUILDERS[kind](asm.parts[part], samples_per_segment)
    export_mesh(m, out)
    click.echo(f"{kind} mesh of {aname}: {len(m.vertices)} vertices, "
               f"{len(m.triangles)} triangles -> {out}")


@main.command()
@click.argument("mesh_path", type=click.Path(exists=True))
@click.option("-o", "--out", type=click.Path(), default=None)
@_typed_errors
def measure(mesh_path, out):
    """Mass properties of a watertight mesh."""
    m = load_mesh(mesh_path)
    mp = mass_properties(m)
    _emit(dumps_canonical({
        "volume": mp.volume, "com": mp.com.tolist(),
        "inertia": mp.inertia.tolist(), "lambda_max": mp.lambda_max,
        "diag_bb": mp.diag_bb, "surface_area": mp.surface_area}), out)


@main.command()
@click.argument("ideal", type=click.Path(exists=True))
@click.argument("subject", type=click.Path(exists=True))
@click.option("--samples", default=50_000, show_default=True)
@click.option("--seed", default=None, type=int,
              help="sampling seed (default: SCAFFOLD_SEED or 0)")
@click.option("--duration", default=None, type=float,
              help="modeling duration in seconds (enables efficiency)")
@click.option("-o", "--out", type=click.Path(), default=None,
              help="write a .screport file instead of stdout")
@_typed_errors
def compare(ideal, subject, samples, seed, duration, out):
    """Shape-error report between an ideal and a subject mesh."""
    if seed is None:
        seed = default_seed()
    report = shape_errors(load_mesh(ideal), load_mesh(subject),
                          sample_count=samples, seed=seed, duration=duration)
    _emit(dumps_canonical(report_to_dict(report)), out)


@main.command()
@click.argument("projects", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--slices", "n_slices", required=True, type=int)
@click.option("--handles", "n_handles", required=True, type=int)
@click.option("--align-scale", is_flag=True, default=False)
@click.option("-o", "--out", type=click.Path(), required=True)
@_typed_errors
def merge(projects, n_slices, n_handles, align_scale, out):
    """Merge scaffolds from several projects into a prototype scaffold."""
    scaffolds = []
    for path in projects:
        doc = load_project(path)
        _, asm = _single_part(doc, None, 0)
        scaffolds.append(asm.parts[0])
    proto = prototype_scaffold(scaffolds, n_slices, n_handles,
                               align_scale=align_scale)
    doc = ProjectDocument(assemblies={
        "prototype": PartAssembly((proto,), "prototype")})
    save_project(doc, out)
    click.echo(f"prototype of {len(scaffolds)} scaffolds -> {out}")


@main.command("grasp-eval")
@click.argument("project", type=click.Path(exists=True))
@click.argument("grasp_id")
@click.option("--assembly", default=None)
@click.option("--cone-edges", default=8, show_default=True)
@click.option("--direction-samples", default=1024, show_default=True)
@click.option("-o", "--out", type=click.Path(), default=None)
@_typed_errors
def grasp_eval(project, grasp_id, assembly, cone_edges, direction_samples,
               out):
    """Evaluate a stored grasp annotation against its object's mesh."""
    from .grasp import GripperModel, close_gripper, grasp_quality

    doc = load_project(project)
    if grasp_id not in doc.grasps:
        raise ScaffoldError(f"unknown grasp {grasp_id!r}")
    grasp = doc.grasps[grasp_id]
    aname, asm = _single_part(doc, assembly or grasp.object_ref or None, 0)
    m = final_mesh(asm)
    contacts = close_gripper(GripperModel(), grasp.grasp_pose, m,
                             seed=default_seed())
    q = grasp_quality(contacts, mass_properties(m).com,
                      cone_edges=cone_edges,
                      direction_samples=direction_samples)
    _emit(dumps_canonical({
        "gws_volume": q.gws_volume, "epsilon": q.epsilon,
        "force_closure": q.force_closure, "torque_scale": q.torque_scale,
        "contact_count": len(contacts)}), out)


@main.command("path-compare")
@click.argument("project_a", type=click.Path(exists=True))
@click.argument("project_b", type=click.Path(exists=True))
@click.option("--path-a", default=None, help="path name in the first file")
@click.option("--path-b", default=None, help="path name in the second file")
@click.option("--resample", default=256, show_default=True)
@_typed_errors
def path_compare(project_a, project_b, path_a, path_b, resample):
    """Ribbon area between two stored waypoint paths."""
    def pick(path_file, name):
        doc = load_project(path_file)
        if name is None:
            if len(doc.paths) != 1:
                raise ScaffoldError(
                    f"{path_file} holds several paths; pass --path-a/--path-b")
            name = next(iter(doc.paths))
        if name not in doc.paths:
            raise ScaffoldError(f"unknown path {name!r} in {path_file}")
        return doc.paths[name]

    area = ribbon_area(pick(project_a, path_a), pick(project_b, path_b),
                       resample_n=resample)
    click.echo(dumps_canonical({"ribbon_area": area}))


@main.command()
@click.option("--port", default=7420, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@_typed_errors
def serve(port, host):
    """Start the HTTP session service."""
    from .service import serve as run
    run(port=port, host=host)


if __name__ == "__main__":
    main()
