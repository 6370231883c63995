import { describe, expect, it } from "vitest";

import { SessionClient, type Transport } from "../src/client.js";
import { ServiceError } from "../src/types.js";
import { FakeServer, makeDocument } from "./fakeServer.js";

describe("SessionClient", () => {
  it("creates a session and fetches the same document back", async () => {
    const server = new FakeServer();
    const client = new SessionClient(server.transport);
    const doc = makeDocument();
    const sid = await client.createSession(doc);
    expect(sid).toMatch(/^s\d+$/);
    const served = await client.getDocument(sid);
    expect(served).toEqual(doc);
  });

  it("creates an empty session when no document is given", async () => {
    const server = new FakeServer();
    const client = new SessionClient(server.transport);
    const sid = await client.createSession();
    const served = await client.getDocument(sid);
    expect(Object.keys(served.clouds)).toEqual([]);
    expect(Object.keys(served.assemblies)).toEqual([]);
  });

  it("throws a typed ServiceError for an unknown session", async () => {
    const server = new FakeServer();
    const client = new SessionClient(server.transport);
    const err = await client.getDocument("nope").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect((err as ServiceError).errorType).toBe("ScaffoldError");
    expect((err as ServiceError).message).toContain("nope");
  });

  it("surfaces op rejections with the service's error type", async () => {
    const server = new FakeServer();
    const client = new SessionClient(server.transport);
    const sid = await client.createSession(makeDocument());
    const err = await client
      .runOp(sid, "delete_slice", { assembly: "obj", index: 77 })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect((err as ServiceError).errorType).toBe("InvalidOperationError");
  });

  it("sends ops to the route named after the operation", async () => {
    const calls: string[] = [];
    const server = new FakeServer();
    const spying: Transport = (method, path, body) => {
      calls.push(`${method} ${path}`);
      return server.transport(method, path, body);
    };
    const client = new SessionClient(spying);
    const sid = await client.createSession(makeDocument());
    await client.runOp(sid, "set_flags", { name: "obj", locked: true });
    await client.getLog(sid);
    await client.save(sid, "/tmp/out.scafproj");
    expect(calls).toEqual([
      "POST /sessions",
      `POST /sessions/${sid}/ops/set_flags`,
      `GET /sessions/${sid}/log`,
      `POST /sessions/${sid}/save`,
    ]);
  });

  it("evaluates grasps against the service", async () => {
    const server = new FakeServer();
    const client = new SessionClient(server.transport);
    const doc = makeDocument();
    doc.grasps["g"] = {
      grasp_pose: { position: [0, 0, 0], orientation: [1, 0, 0, 0] },
      pre_grasp: { position: [0, 0, -0.1], orientation: [1, 0, 0, 0] },
      frame: "obj",
      object_ref: "obj",
      labels: {},
    };
    const sid = await client.createSession(doc);
    const quality = await client.graspEval(sid, "obj", "g");
    expect(quality.force_closure).toBe(true);
    expect(quality.contact_count).toBe(8);
    const err = await client
      .graspEval(sid, "obj", "missing")
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
  });

  it("wraps malformed error bodies as HttpError", async () => {
    const broken: Transport = async () => ({
      status: 500,
      body: "internal failure",
    });
    const client = new SessionClient(broken);
    const err = await client.getDocument("x").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect((err as ServiceError).errorType).toBe("HttpError");
  });
});
