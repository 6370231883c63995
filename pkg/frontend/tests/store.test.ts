import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/client.js";
import { SessionStore } from "../src/store.js";
import { FakeServer, makeDocument, mulberry32 } from "./fakeServer.js";

async function newStore(server = new FakeServer()) {
  const client = new SessionClient(server.transport);
  const sid = await client.createSession(makeDocument());
  const store = new SessionStore(client, sid, await client.getDocument(sid));
  return { server, client, sid, store };
}

type Edit = { op: string; params: Record<string, unknown> };

// Slice-count-changing edits are generated against a deterministic count
// mirror, so scripted indices stay valid even while edits are in flight.
function scriptedEdit(rand: () => number, slices: number): Edit {
  const choice = Math.floor(rand() * 6);
  switch (choice) {
    case 0:
      return {
        op: "move_handle",
        params: {
          assembly: "obj",
          slice_index: Math.floor(rand() * slices),
          kind: "external",
          handle_index: Math.floor(rand() * 8),
          new_position: [rand() * 2 - 1, rand() * 2 - 1],
        },
      };
    case 1:
      return {
        op: "transform_slice",
        params: {
          assembly: "obj",
          slice_index: Math.floor(rand() * slices),
          scale: 0.8 + rand() * 0.4,
          translation: [rand() * 0.1, rand() * 0.1, rand() * 0.1],
        },
      };
    case 2:
      return {
        op: "set_slice_spacing_scale",
        params: { assembly: "obj", factor: 0.8 + rand() * 0.4 },
      };
    case 3:
      return {
        op: "set_flags",
        params: { name: rand() < 0.5 ? "obj" : "c", visible: rand() < 0.8 },
      };
    case 4:
      if (slices > 2 && rand() < 0.5) {
        return {
          op: "delete_slice",
          params: { assembly: "obj", index: Math.floor(rand() * slices) },
        };
      }
      return {
        op: "insert_slice",
        params: {
          assembly: "obj",
          at_parameter:
            Math.floor(rand() * (slices - 1)) + 0.2 + rand() * 0.6,
        },
      };
    default:
      return {
        op: "record_waypoint",
        params: {
          name: "p",
          pose: {
            position: [rand(), rand(), rand()],
            orientation: [1, 0, 0, 0],
          },
          pre_pose: {
            position: [0, 0, 0],
            orientation: [1, 0, 0, 0],
          },
        },
      };
  }
}

describe("SessionStore reconciliation", () => {
  it("matches the server document after 50 scripted random edits", async () => {
    const { client, sid, store } = await newStore();
    const rand = mulberry32(42);
    const issued: Edit[] = [];
    let slices = 4;
    for (let i = 0; i < 50; i++) {
      const edit = scriptedEdit(rand, slices);
      if (edit.op === "insert_slice") {
        slices += 1;
      } else if (edit.op === "delete_slice") {
        slices -= 1;
      }
      issued.push(edit);
      // Fire without awaiting: the store must keep per-session order.
      void store.edit(edit.op, edit.params);
    }
    await store.flush();

    // Local render state equals the server-fetched state.
    const served = await client.getDocument(sid);
    expect(store.document).toEqual(served);
    expect(store.failures).toEqual([]);

    // Every edit appears exactly once in the session log, in order.
    const log = await client.getLog(sid);
    expect(log).toHaveLength(50);
    expect(log.map((r) => r.op)).toEqual(issued.map((e) => e.op));
    log.forEach((rec, i) => {
      expect(rec.params).toEqual(issued[i]!.params);
    });
    // Monotonic timestamps.
    for (let i = 1; i < log.length; i++) {
      expect(log[i]!.timestamp).toBeGreaterThan(log[i - 1]!.timestamp);
    }
  });

  it("reconcile() adopts the authoritative document", async () => {
    const { client, sid, store } = await newStore();
    // Another writer (second tab) edits the same session.
    await client.runOp(sid, "set_flags", { name: "obj", locked: true });
    expect(store.document.flags["obj"]).toBeUndefined();
    await store.reconcile();
    expect(store.document.flags["obj"]).toEqual({
      visible: true,
      locked: true,
    });
  });
});

describe("optimistic preview", () => {
  it("applies a handle move locally before the server confirms", async () => {
    const server = new FakeServer();
    // Gate the transport so the request stays in flight.
    let release!: () => void;
    const gate = new Promise<void>((r) => (release = r));
    const inner = server.transport;
    const client = new SessionClient(async (m, p, b) => {
      if (m === "POST" && p.includes("/ops/")) {
        await gate;
      }
      return inner(m, p, b);
    });
    const sid = await client.createSession(makeDocument());
    const store = new SessionStore(client, sid, await client.getDocument(sid));

    const done = store.edit("move_handle", {
      assembly: "obj",
      slice_index: 0,
      kind: "external",
      handle_index: 0,
      new_position: [9, 9],
    });
    // Before the server answers, the local preview already shows the move.
    expect(
      store.document.assemblies["obj"]!.parts[0]!.slices[0]!
        .external_handles[0],
    ).toEqual([9, 9]);
    expect(store.pendingEdits).toBe(1);
    release();
    await done;
    expect(store.pendingEdits).toBe(0);
    expect(
      store.document.assemblies["obj"]!.parts[0]!.slices[0]!
        .external_handles[0],
    ).toEqual([9, 9]);
  });

  it("snaps back when the service rejects the edit", async () => {
    const { store } = await newStore();
    const before = structuredClone(store.document);
    await store.edit("move_handle", {
      assembly: "obj",
      slice_index: 0,
      kind: "external",
      handle_index: 999, // out of range -> rejection
      new_position: [9, 9],
    });
    expect(store.document).toEqual(before);
    expect(store.failures).toHaveLength(1);
    expect(store.failures[0]!.error).toBe("InvalidOperationError");
  });

  it("rejected edits do not reach the log", async () => {
    const { client, sid, store } = await newStore();
    await store.edit("move_handle", {
      assembly: "obj",
      slice_index: 0,
      handle_index: 999,
      new_position: [0, 0],
    });
    await store.edit("set_flags", { name: "obj", locked: true });
    const log = await client.getLog(sid);
    expect(log.map((r) => r.op)).toEqual(["set_flags"]);
  });
});
