"""HTTP session service exposing the editing operations to a UI.

One writer per session: edits are serialized through a per-session lock;
reads are concurrent.  Long mesh computations run as background jobs that
clients poll by id.
"""

from __future__ import annotations

import threading
import uuid
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import ScaffoldError
from .geometry import Pose
from .grasp import GripperModel, close_gripper, grasp_quality
from .meshing import difference_mesh, final_mesh, hole_mesh, skin_mesh
from .metrics import mass_properties
from .project import (
    ProjectDocument,
    SessionLog,
    apply_operation,
    default_seed,
    document_from_dict,
    document_to_dict,
    save_project,
)

DEFAULT_PORT = 7420

MESH_KINDS = {"skin": skin_mesh, "hole": hole_mesh,
              "difference": difference_mesh}


class _Session:
    def __init__(self, doc: ProjectDocument):
        self.doc = doc
        self.log = SessionLog()
        self.lock = threading.Lock()
        self.jobs = {}            # job_id -> dict(status, ...)


class _CreateSession(BaseModel):
    document: Optional[dict] = None


class _MeshJob(BaseModel):
    assembly: str
    part: Optional[int] = None         # None -> whole assembly (final mesh)
    kind: str = "final"
    samples_per_segment: int = 8


class _GraspEval(BaseModel):
    assembly: str
    grasp: str
    gripper: dict = {}
    samples_per_segment: int = 8
    cone_edges: int = 8
    direction_samples: int = 1024
    surface_samples: int = 20000


class _Save(BaseModel):
    path: str


def create_app() -> FastAPI:
    app = FastAPI(title="pcscaffold session service")
    sessions = {}

    @app.exception_handler(ScaffoldError)
    async def _scaffold_error(request: Request, exc: ScaffoldError):
        return JSONResponse(status_code=422,
                            content={"error": type(exc).__name__,
                                     "message": str(exc)})

    def get_session(session_id) -> _Session:
        if session_id not in sessions:
            raise ScaffoldError(f"unknown session {session_id!r}")
        return sessions[session_id]

    @app.post("/sessions")
    def create_session(body: _CreateSession):
        doc = (ProjectDocument() if body.document is None
               else document_from_dict(body.document))
        sid = uuid.uuid4().hex
        sessions[sid] = _Session(doc)
        return {"session_id": sid}

    @app.get("/sessions/{sid}/document")
    def get_document(sid: str):
        return {"document": document_to_dict(get_session(sid).doc)}

    @app.get("/sessions/{sid}/log")
    def get_log(sid: str):
        return {"records": get_session(sid).log.to_list()}

    @app.post("/sessions/{sid}/ops/{op_name}")
    async def run_op(sid: str, op_name: str, request: Request):
        params = await request.json()
        if not isinstance(params, dict):
            raise ScaffoldError("operation parameters must be a JSON object")
        session = get_session(sid)
        with session.lock:          # one writer per session
            new_doc = apply_operation(session.doc, op_name, params)
            session.doc = new_doc
            record = session.log.append(op_name, params)
        return {"document": document_to_dict(new_doc),
                "record": {"timestamp": record.timestamp, "op": record.op}}

    @app.post("/sessions/{sid}/mesh-jobs")
    def start_mesh_job(sid: str, body: _MeshJob):
        session = get_session(sid)
        with session.lock:
            if body.assembly not in session.doc.assemblies:
                raise ScaffoldError(f"unknown assembly {body.assembly!r}")
            asm = session.doc.assemblies[body.assembly]
            if body.kind != "final" and body.kind not in MESH_KINDS:
                raise ScaffoldError(f"unknown mesh kind {body.kind!r}")
            job_id = uuid.uuid4().hex
            session.jobs[job_id] = {"status": "pending"}

        def work():
            try:
                if body.kind == "final":
                    mesh = final_mesh(asm, body.samples_per_segment)
                else:
                    part = asm.parts[body.part or 0]
                    mesh = MESH_KINDS[body.kind](part,
                                                 body.samples_per_segment)
                session.jobs[job_id] = {
                    "status": "done",
                    "mesh": {"vertices": mesh.vertices.tolist(),
                             "triangles": mesh.triangles.tolist(),
                             "label": mesh.label}}
            except Exception as e:       # report the failure to the poller
                session.jobs[job_id] = {"status": "error",
                                        "error": type(e).__name__,
                                        "message": str(e)}

        threading.Thread(target=work, daemon=True).start()
        return {"job_id": job_id}

    @app.get("/sessions/{sid}/mesh-jobs/{job_id}")
    def poll_mesh_job(sid: str, job_id: str):
        session = get_session(sid)
        if job_id not in session.jobs:
            raise ScaffoldError(f"unknown job {job_id!r}")
        return session.jobs[job_id]

    @app.post("/sessions/{sid}/grasp-eval")
    def grasp_eval(sid: str, body: _GraspEval):
        session = get_session(sid)
        with session.lock:
            doc = session.doc
        if body.assembly not in doc.assemblies:
            raise ScaffoldError(f"unknown assembly {body.assembly!r}")
        if body.grasp not in doc.grasps:
            raise ScaffoldError(f"unknown grasp {body.grasp!r}")
        grasp = doc.grasps[body.grasp]
        mesh = final_mesh(doc.assemblies[body.assembly],
                          body.samples_per_segment)
        gripper = GripperModel(**body.gripper)
        pose = Pose(np.array(grasp.grasp_pose.position),
                    np.array(grasp.grasp_pose.orientation))
        contacts = close_gripper(gripper, pose, mesh,
                                 samples=body.surface_samples,
                                 seed=default_seed())
        com = mass_properties(mesh).com
        q = grasp_quality(contacts, com, cone_edges=body.cone_edges,
                          direction_samples=body.direction_samples)
        return {"gws_volume": q.gws_volume, "epsilon": q.epsilon,
                "force_closure": q.force_closure,
                "torque_scale": q.torque_scale,
                "contact_count": len(contacts)}

    @app.post("/sessions/{sid}/save")
    def save(sid: str, body: _Save):
        session = get_session(sid)
        with session.lock:
            save_project(session.doc, body.path)
        return {"saved": body.path}

    return app


def serve(port: int = DEFAULT_PORT, host: str = "127.0.0.1"):
    import uvicorn
    uvicorn.run(create_app(), host=host, port=port)
