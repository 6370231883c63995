import { describe, expect, it } from "vitest";

import {
  axisConstrainedDelta,
  dragHandleParams,
  projectIntoPlane,
  screenDeltaToWorld,
} from "../src/gizmo.js";
import { quatFromAxisAngle } from "../src/math.js";
import type { Pose, Slice } from "../src/types.js";

const identity: Pose = { position: [0, 0, 0], orientation: [1, 0, 0, 0] };

function makeSlice(orientation: number[] = [1, 0, 0, 0]): Slice {
  return {
    pose: { position: [0, 0, 0], orientation },
    external_handles: [
      [1, 0],
      [0, 1],
      [-1, 0],
      [0, -1],
    ],
    hole_handles: null,
    hole_scale: 1,
  };
}

describe("dragHandleParams", () => {
  it("returns null for a zero screen delta (no service call)", () => {
    const params = dragHandleParams(
      "obj",
      0,
      0,
      "external",
      0,
      makeSlice(),
      identity,
      { dx: 0, dy: 0 },
    );
    expect(params).toBeNull();
  });

  it("drag along the plane normal produces no in-plane motion", () => {
    // Slice plane normal along world x; camera rotated so that screen-x
    // drags move the cursor along world x.
    const slice = makeSlice(quatFromAxisAngle([0, 1, 0], Math.PI / 2));
    const camera: Pose = {
      position: [0, 0, -5],
      orientation: quatFromAxisAngle([0, 1, 0], Math.PI / 2),
    };
    // Under this camera, screen dy maps to world y (in-plane), while the
    // world displacement of a pure "toward the plane normal" drag is
    // along world x = the plane normal.
    const world = screenDeltaToWorld(camera, { dx: 0, dy: 1 });
    expect(world[0]).toBeCloseTo(0, 12);
    expect(world[1]).toBeCloseTo(1, 12);
    const normalDrag = projectIntoPlane(slice.pose, [1, 0, 0]);
    expect(Math.abs(normalDrag[0])).toBeLessThan(1e-12);
    expect(Math.abs(normalDrag[1])).toBeLessThan(1e-12);
    const params = dragHandleParams(
      "obj",
      0,
      0,
      "external",
      0,
      slice,
      identity, // camera looks along +z: screen x/y = world x/y
      { dx: 0.5, dy: 0 }, // world-x drag = along the plane normal
    );
    expect(params).toBeNull();
  });

  it("projects an in-plane drag onto the handle position", () => {
    const params = dragHandleParams(
      "obj",
      0,
      2,
      "external",
      1,
      makeSlice(), // plane normal = world z, u/v = world x/y
      identity,
      { dx: 0.25, dy: -0.5 },
    );
    expect(params).not.toBeNull();
    expect(params!.new_position).toEqual([0.25, 0.5]);
    expect(params!.slice_index).toBe(2);
    expect(params!.kind).toBe("external");
  });

  it("respects a rotated slice plane", () => {
    // Plane rotated 90 degrees about z: plane-u = world y, plane-v = -x.
    const slice = makeSlice(quatFromAxisAngle([0, 0, 1], Math.PI / 2));
    const uv = projectIntoPlane(slice.pose, [0, 1, 0]);
    expect(uv[0]).toBeCloseTo(1, 12);
    expect(uv[1]).toBeCloseTo(0, 12);
  });

  it("rejects out-of-range handle indices", () => {
    expect(() =>
      dragHandleParams("obj", 0, 0, "external", 99, makeSlice(), identity, {
        dx: 1,
        dy: 0,
      }),
    ).toThrow(/out of range/);
  });
});

describe("axisConstrainedDelta", () => {
  it("measures displacement along the arrow axis only", () => {
    const d = axisConstrainedDelta(identity, [0, 1, 0], { dx: 3, dy: 2 });
    expect(d).toBe(2);
    const zero = axisConstrainedDelta(identity, [0, 0, 1], {
      dx: 3,
      dy: 2,
    });
    expect(zero).toBe(0);
  });
});
