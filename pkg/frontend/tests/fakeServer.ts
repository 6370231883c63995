/**
 * In-memory stand-in for the session service, implementing the same HTTP
 * surface (routes, bodies, error shape) against a JSON document.  Only
 * the edit operations exercised by the UI tests are implemented; the
 * semantics here define "server truth" for reconciliation testing.
 */

import type { Transport, TransportResponse } from "../src/client.js";
import {
  emptyDocument,
  type LogRecord,
  type ProjectDocument,
  type Slice,
} from "../src/types.js";

function clone<T>(x: T): T {
  return structuredClone(x);
}

function fail(error: string, message: string): TransportResponse {
  return { status: 422, body: { error, message } };
}

function ok(body: unknown): TransportResponse {
  return { status: 200, body };
}

type Params = Record<string, unknown>;

interface Session {
  doc: ProjectDocument;
  log: LogRecord[];
  clock: number;
  jobs: Map<string, { polls: number; failWith?: string }>;
}

export class FakeServer {
  readonly sessions = new Map<string, Session>();
  /** Number of polls a mesh job stays pending before completing. */
  jobDelayPolls = 2;
  private nextId = 1;

  transport: Transport = async (method, path, body) =>
    this.handle(method, path, body);

  private getSlice(
    doc: ProjectDocument,
    params: Params,
  ): { slice: Slice; error?: undefined } | { error: TransportResponse } {
    const asm = doc.assemblies[params.assembly as string];
    if (!asm) {
      return {
        error: fail(
          "InvalidOperationError",
          `unknown assembly '${String(params.assembly)}'`,
        ),
      };
    }
    const part = asm.parts[(params.part as number) ?? 0];
    if (!part) {
      return { error: fail("InvalidOperationError", "part out of range") };
    }
    const slice = part.slices[params.slice_index as number];
    if (!slice) {
      return {
        error: fail("InvalidOperationError", "slice index out of range"),
      };
    }
    return { slice };
  }

  private applyOp(
    session: Session,
    op: string,
    params: Params,
  ): TransportResponse | null {
    const doc = session.doc;
    switch (op) {
      case "move_handle": {
        const res = this.getSlice(doc, params);
        if (res.error) {
          return res.error;
        }
        const ring =
          (params.kind ?? "external") === "external"
            ? res.slice.external_handles
            : res.slice.hole_handles;
        const idx = params.handle_index as number;
        if (!ring || idx < 0 || idx >= ring.length) {
          return fail("InvalidOperationError", "handle index out of range");
        }
        ring[idx] = [...(params.new_position as number[])];
        return null;
      }
      case "transform_slice": {
        const res = this.getSlice(doc, params);
        if (res.error) {
          return res.error;
        }
        const s = (params.scale as number | undefined) ?? 1.0;
        if (s <= 0) {
          return fail("InvalidOperationError", "scale must be positive");
        }
        res.slice.external_handles = res.slice.external_handles.map((h) => [
          h[0]! * s,
          h[1]! * s,
        ]);
        if (res.slice.hole_handles) {
          res.slice.hole_handles = res.slice.hole_handles.map((h) => [
            h[0]! * s,
            h[1]! * s,
          ]);
        }
        const t = (params.translation as number[] | undefined) ?? [0, 0, 0];
        // Axis-aligned fake: slice planes here are world-aligned.
        res.slice.pose.position = [
          res.slice.pose.position[0]! + t[0]!,
          res.slice.pose.position[1]! + t[1]!,
          res.slice.pose.position[2]! + t[2]!,
        ];
        return null;
      }
      case "set_slice_spacing_scale": {
        const asm = doc.assemblies[params.assembly as string];
        if (!asm) {
          return fail("InvalidOperationError", "unknown assembly");
        }
        const factor = params.factor as number;
        if (!(factor > 0)) {
          return fail("InvalidOperationError", "factor must be positive");
        }
        for (const part of asm.parts) {
          const zs = part.slices.map((sl) => sl.pose.position[2]!);
          const mid = zs.reduce((a, b) => a + b, 0) / zs.length;
          part.slices.forEach((sl, i) => {
            sl.pose.position[2] = mid + factor * (zs[i]! - mid);
          });
        }
        return null;
      }
      case "delete_slice": {
        const asm = doc.assemblies[params.assembly as string];
        const part = asm?.parts[(params.part as number) ?? 0];
        if (!part) {
          return fail("InvalidOperationError", "unknown assembly/part");
        }
        const idx = params.index as number;
        if (idx < 0 || idx >= part.slices.length) {
          return fail("InvalidOperationError", "slice index out of range");
        }
        if (part.slices.length <= 2) {
          return fail(
            "InvalidOperationError",
            "cannot delete below 2 slices",
          );
        }
        part.slices.splice(idx, 1);
        return null;
      }
      case "insert_slice": {
        const asm = doc.assemblies[params.assembly as string];
        const part = asm?.parts[(params.part as number) ?? 0];
        if (!part) {
          return fail("InvalidOperationError", "unknown assembly/part");
        }
        const at = params.at_parameter as number;
        const i = Math.floor(at);
        if (at <= 0 || at >= part.slices.length - 1 || at === i) {
          return fail("InvalidOperationError", "bad insertion parameter");
        }
        const u = at - i;
        const a = part.slices[i]!;
        const b = part.slices[i + 1]!;
        const lerp = (x: number, y: number) => (1 - u) * x + u * y;
        const mid: Slice = clone(a);
        mid.pose.position = [
          lerp(a.pose.position[0]!, b.pose.position[0]!),
          lerp(a.pose.position[1]!, b.pose.position[1]!),
          lerp(a.pose.position[2]!, b.pose.position[2]!),
        ];
        mid.external_handles = a.external_handles.map((h, k) => [
          lerp(h[0]!, b.external_handles[k]?.[0] ?? h[0]!),
          lerp(h[1]!, b.external_handles[k]?.[1] ?? h[1]!),
        ]);
        part.slices.splice(i + 1, 0, mid);
        return null;
      }
      case "set_flags": {
        const name = params.name as string;
        const old = doc.flags[name] ?? { visible: true, locked: false };
        doc.flags[name] = {
          visible: (params.visible as boolean | undefined) ?? old.visible,
          locked: (params.locked as boolean | undefined) ?? old.locked,
        };
        return null;
      }
      case "record_waypoint": {
        const name = params.name as string;
        const pose = clone(params.pose) as Slice["pose"];
        const existing = doc.paths[name];
        if (existing) {
          existing.poses.push(pose);
        } else {
          if (!params.pre_pose) {
            return fail(
              "InvalidOperationError",
              "new path needs a pre_pose",
            );
          }
          doc.paths[name] = {
            poses: [clone(params.pre_pose) as Slice["pose"], pose],
            timestamps: null,
            object_ref: (params.object_ref as string | undefined) ?? "",
          };
        }
        return null;
      }
      case "insert_scaffold_pov": {
        const dir = params.view_direction as number[];
        const cloudName = params.cloud as string;
        if (!doc.clouds[cloudName]) {
          return fail("InvalidOperationError", "unknown cloud");
        }
        const name = params.assembly as string;
        const ring = [0, 1, 2, 3, 4, 5, 6, 7].map((k) => [
          0.5 * Math.cos((2 * Math.PI * k) / 8),
          0.5 * Math.sin((2 * Math.PI * k) / 8),
        ]);
        doc.assemblies[name] = {
          name,
          parts: [
            {
              slices: [0, 1].map((k) => ({
                pose: {
                  position: [dir[0]! * k, dir[1]! * k, dir[2]! * k],
                  orientation: [1, 0, 0, 0],
                },
                external_handles: clone(ring),
                hole_handles: null,
                hole_scale: 1.0,
              })),
              cloud: cloudName,
              name,
              tension: 0.5,
              obb: null,
              primitive: "cylinder",
            },
          ],
        };
        return null;
      }
      default:
        return fail("InvalidOperationError", `unknown operation '${op}'`);
    }
  }

  private handle(
    method: string,
    path: string,
    body: unknown,
  ): TransportResponse {
    const parts = path.split("/").filter((p) => p.length > 0);
    if (method === "POST" && path === "/sessions") {
      const id = `s${this.nextId++}`;
      const init = (body as { document?: ProjectDocument }).document;
      this.sessions.set(id, {
        doc: init ? clone(init) : emptyDocument(),
        log: [],
        clock: 0,
        jobs: new Map(),
      });
      return ok({ session_id: id });
    }
    const session = this.sessions.get(parts[1] ?? "");
    if (!session) {
      return fail("ScaffoldError", `unknown session '${parts[1]}'`);
    }
    if (method === "GET" && parts[2] === "document") {
      return ok({ document: clone(session.doc) });
    }
    if (method === "GET" && parts[2] === "log") {
      return ok({ records: clone(session.log) });
    }
    if (method === "POST" && parts[2] === "ops") {
      const op = parts[3]!;
      const params = (body ?? {}) as Params;
      const next = clone(session.doc);
      const trial: Session = { ...session, doc: next };
      const error = this.applyOp(trial, op, params);
      if (error) {
        return error; // rejected edits leave the document untouched
      }
      session.doc = next;
      session.clock += 1;
      session.log.push({
        timestamp: session.clock,
        op,
        params: clone(params),
        duration: 0.1,
      });
      return ok({
        document: clone(session.doc),
        record: { timestamp: session.clock, op },
      });
    }
    if (method === "POST" && parts[2] === "mesh-jobs") {
      const { assembly } = body as { assembly: string };
      if (!session.doc.assemblies[assembly]) {
        return fail("ScaffoldError", `unknown assembly '${assembly}'`);
      }
      const id = `job${this.nextId++}`;
      session.jobs.set(id, { polls: 0 });
      return ok({ job_id: id });
    }
    if (method === "GET" && parts[2] === "mesh-jobs") {
      const job = session.jobs.get(parts[3] ?? "");
      if (!job) {
        return fail("ScaffoldError", `unknown job '${parts[3]}'`);
      }
      job.polls += 1;
      if (job.failWith && job.polls > this.jobDelayPolls) {
        return ok({
          status: "error",
          error: job.failWith,
          message: "mesh computation failed",
        });
      }
      if (job.polls > this.jobDelayPolls) {
        return ok({
          status: "done",
          mesh: {
            vertices: [
              [0, 0, 0],
              [1, 0, 0],
              [0, 1, 0],
            ],
            triangles: [[0, 1, 2]],
            label: "final",
          },
        });
      }
      return ok({ status: "pending" });
    }
    if (method === "POST" && parts[2] === "grasp-eval") {
      const { assembly, grasp } = body as { assembly: string; grasp: string };
      if (!session.doc.assemblies[assembly]) {
        return fail("ScaffoldError", `unknown assembly '${assembly}'`);
      }
      if (!session.doc.grasps[grasp]) {
        return fail("ScaffoldError", `unknown grasp '${grasp}'`);
      }
      return ok({
        gws_volume: 0.25,
        epsilon: 0.1,
        force_closure: true,
        torque_scale: 0.5,
        contact_count: 8,
      });
    }
    if (method === "POST" && parts[2] === "save") {
      return ok({ saved: (body as { path: string }).path });
    }
    return fail("ScaffoldError", `no route ${method} ${path}`);
  }
}

/** Deterministic 32-bit PRNG for scripted edit sequences. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** A small starter document: one cloud and one 4-slice scaffold. */
export function makeDocument(): ProjectDocument {
  const doc = emptyDocument();
  doc.clouds["c"] = {
    points: [
      [0, 0, 0],
      [1, 0, 0],
      [0, 1, 0],
      [0, 0, 1],
    ],
    colors: null,
    name: "c",
  };
  const ring = [0, 1, 2, 3, 4, 5, 6, 7].map((k) => [
    Math.cos((2 * Math.PI * k) / 8),
    Math.sin((2 * Math.PI * k) / 8),
  ]);
  doc.assemblies["obj"] = {
    name: "obj",
    parts: [
      {
        slices: [0, 1, 2, 3].map((k) => ({
          pose: { position: [0, 0, k * 0.5], orientation: [1, 0, 0, 0] },
          external_handles: structuredClone(ring),
          hole_handles: null,
          hole_scale: 1.0,
        })),
        cloud: "c",
        name: "obj",
        tension: 0.5,
        obb: null,
        primitive: "cylinder",
      },
    ],
  };
  return doc;
}
