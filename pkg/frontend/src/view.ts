/**
 * View state of the editor: camera, projection and navigation modes, the
 * single active selection, and per-item visibility flags.  The camera
 * looks along its local +z axis.
 */

import { asQuat, quatRotate } from "./math.js";
import type { Pose, Vec3 } from "./types.js";

export type ProjectionMode = "perspective" | "orthographic";
export type NavigationMode = "exocentric" | "egocentric";

export type Selection =
  | { kind: "none" }
  | { kind: "scaffold"; assembly: string; part: number }
  | {
      kind: "slice";
      assembly: string;
      part: number;
      slice: number;
    }
  | {
      kind: "handle";
      assembly: string;
      part: number;
      slice: number;
      ring: "external" | "hole";
      handle: number;
    }
  | { kind: "gripper" }
  | { kind: "waypoint"; path: string; index: number };

export interface ViewState {
  camera: Pose;
  projection: ProjectionMode;
  navigation: NavigationMode;
  selection: Selection;
  hidden: Set<string>;
}

export function initialView(): ViewState {
  return {
    camera: { position: [0, 0, -5], orientation: [1, 0, 0, 0] },
    projection: "perspective",
    navigation: "exocentric",
    selection: { kind: "none" },
    hidden: new Set(),
  };
}

/** Unit forward vector of the camera (local +z in world coordinates). */
export function cameraForward(view: ViewState): Vec3 {
  return quatRotate(asQuat(view.camera.orientation), [0, 0, 1]);
}

/** Exactly one selection at a time: setting one replaces the previous. */
export function withSelection(view: ViewState, sel: Selection): ViewState {
  return { ...view, selection: sel };
}

export function toggleHidden(view: ViewState, item: string): ViewState {
  const hidden = new Set(view.hidden);
  if (hidden.has(item)) {
    hidden.delete(item);
  } else {
    hidden.add(item);
  }
  return { ...view, hidden };
}

/**
 * Parameters of the POV scaffold insertion: the current camera forward
 * vector is sent verbatim as the view direction.
 */
export function povInsertParams(
  view: ViewState,
  cloud: string,
  assembly: string,
  primitive: "cylinder" | "box",
): Record<string, unknown> {
  const forward = cameraForward(view);
  return {
    cloud,
    assembly,
    primitive,
    view_direction: [forward[0], forward[1], forward[2]],
  };
}
