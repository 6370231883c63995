/**
 * Plane-constrained drag math for handle and slice widgets.  All precision
 * edits are plane- or axis-constrained; there are no free 3-D drags.
 */

import {
  add,
  asQuat,
  asVec2,
  dot,
  planeBasis,
  quatRotate,
  scale,
} from "./math.js";
import type { Pose, Slice, Vec2, Vec3 } from "./types.js";

export interface ScreenDelta {
  dx: number;
  dy: number;
}

/**
 * World-space displacement of a screen-space drag under an orthographic
 * camera (camera right = local x, camera up = local y).
 */
export function screenDeltaToWorld(camera: Pose, delta: ScreenDelta): Vec3 {
  const q = asQuat(camera.orientation);
  const right = quatRotate(q, [1, 0, 0]);
  const up = quatRotate(q, [0, 1, 0]);
  return add(scale(right, delta.dx), scale(up, delta.dy));
}

/**
 * Project a world displacement into a slice plane's (u, v) coordinates.
 * Motion along the plane normal contributes nothing.
 */
export function projectIntoPlane(planePose: Pose, world: Vec3): Vec2 {
  const { u, v } = planeBasis(asQuat(planePose.orientation));
  return [dot(world, u), dot(world, v)];
}

/**
 * The move_handle parameters produced by dragging a handle by a screen
 * delta, or null when the drag produces no in-plane motion (no service
 * call is issued).
 */
export function dragHandleParams(
  assembly: string,
  part: number,
  sliceIndex: number,
  ring: "external" | "hole",
  handleIndex: number,
  slice: Slice,
  camera: Pose,
  delta: ScreenDelta,
): Record<string, unknown> | null {
  if (delta.dx === 0 && delta.dy === 0) {
    return null;
  }
  const world = screenDeltaToWorld(camera, delta);
  const uv = projectIntoPlane(slice.pose, world);
  // Drags along the plane normal leave at most rounding noise in (u, v).
  if (Math.hypot(uv[0], uv[1]) < 1e-12) {
    return null;
  }
  const handles =
    ring === "external" ? slice.external_handles : slice.hole_handles;
  if (!handles || handleIndex < 0 || handleIndex >= handles.length) {
    throw new Error(`handle index ${handleIndex} out of range`);
  }
  const current = asVec2(handles[handleIndex]!);
  return {
    assembly,
    part,
    slice_index: sliceIndex,
    kind: ring,
    handle_index: handleIndex,
    new_position: [current[0] + uv[0], current[1] + uv[1]],
  };
}

/**
 * Arrow gizmo: a drag constrained to a single world axis (the paper's
 * "arrow" pattern); returns the signed distance along the axis.
 */
export function axisConstrainedDelta(
  camera: Pose,
  axis: Vec3,
  delta: ScreenDelta,
): number {
  return dot(screenDeltaToWorld(camera, delta), axis);
}
