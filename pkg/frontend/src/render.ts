/**
 * Pure scene description: what a frame would draw for a document + view.
 * External handles render green, hole handles blue; hidden items are
 * skipped and locked items are drawn non-interactive.
 */

import type { ProjectDocument } from "./types.js";
import type { ViewState } from "./view.js";

export const EXTERNAL_HANDLE_COLOR = "#2e9e4f"; // green
export const HOLE_HANDLE_COLOR = "#2e5f9e"; // blue

export type SceneItem =
  | { type: "grid" }
  | { type: "cloud"; name: string; pointCount: number; locked: boolean }
  | {
      type: "handles";
      assembly: string;
      part: number;
      slice: number;
      ring: "external" | "hole";
      color: string;
      count: number;
      locked: boolean;
    }
  | { type: "slice-widget"; assembly: string; part: number; slice: number }
  | { type: "waypoint-ghost"; path: string; index: number };

function isHidden(doc: ProjectDocument, view: ViewState, name: string) {
  if (view.hidden.has(name)) {
    return true;
  }
  const flags = doc.flags[name];
  return flags !== undefined && !flags.visible;
}

function isLocked(doc: ProjectDocument, name: string) {
  return doc.flags[name]?.locked ?? false;
}

export function sceneItems(
  doc: ProjectDocument,
  view: ViewState,
): SceneItem[] {
  const items: SceneItem[] = [{ type: "grid" }];
  for (const [name, cloud] of Object.entries(doc.clouds)) {
    if (isHidden(doc, view, name)) {
      continue;
    }
    items.push({
      type: "cloud",
      name,
      pointCount: cloud.points.length,
      locked: isLocked(doc, name),
    });
  }
  for (const [name, assembly] of Object.entries(doc.assemblies)) {
    if (isHidden(doc, view, name)) {
      continue;
    }
    const locked = isLocked(doc, name);
    assembly.parts.forEach((part, partIndex) => {
      part.slices.forEach((slice, sliceIndex) => {
        items.push({
          type: "slice-widget",
          assembly: name,
          part: partIndex,
          slice: sliceIndex,
        });
        items.push({
          type: "handles",
          assembly: name,
          part: partIndex,
          slice: sliceIndex,
          ring: "external",
          color: EXTERNAL_HANDLE_COLOR,
          count: slice.external_handles.length,
          locked,
        });
        if (slice.hole_handles) {
          items.push({
            type: "handles",
            assembly: name,
            part: partIndex,
            slice: sliceIndex,
            ring: "hole",
            color: HOLE_HANDLE_COLOR,
            count: slice.hole_handles.length,
            locked,
          });
        }
      });
    });
  }
  for (const [name, path] of Object.entries(doc.paths)) {
    if (isHidden(doc, view, name) || path.poses.length === 0) {
      continue;
    }
    items.push({
      type: "waypoint-ghost",
      path: name,
      index: path.poses.length - 1,
    });
  }
  return items;
}
