import { describe, expect, it } from "vitest";

import {
  EXTERNAL_HANDLE_COLOR,
  HOLE_HANDLE_COLOR,
  sceneItems,
  type SceneItem,
} from "../src/render.js";
import { emptyDocument } from "../src/types.js";
import { initialView, toggleHidden } from "../src/view.js";
import { makeDocument } from "./fakeServer.js";

function handles(items: SceneItem[]) {
  return items.filter((i) => i.type === "handles");
}

describe("sceneItems", () => {
  it("draws only the grid for an empty document", () => {
    const items = sceneItems(emptyDocument(), initialView());
    expect(items).toEqual([{ type: "grid" }]);
  });

  it("emits one handle ring per slice with matching counts", () => {
    const doc = makeDocument(); // 4 slices, 8 external handles each
    const items = sceneItems(doc, initialView());
    const rings = handles(items);
    expect(rings).toHaveLength(4);
    for (const ring of rings) {
      expect(ring.ring).toBe("external");
      expect(ring.count).toBe(8);
      expect(ring.color).toBe(EXTERNAL_HANDLE_COLOR);
      expect(ring.locked).toBe(false);
    }
    expect(items.filter((i) => i.type === "slice-widget")).toHaveLength(4);
    expect(items.filter((i) => i.type === "cloud")).toHaveLength(1);
  });

  it("colors hole handle rings distinctly", () => {
    const doc = makeDocument();
    const slice = doc.assemblies["obj"]!.parts[0]!.slices[1]!;
    slice.hole_handles = [
      [0.2, 0],
      [0, 0.2],
      [-0.2, 0],
    ];
    const rings = handles(sceneItems(doc, initialView()));
    expect(rings).toHaveLength(5);
    const hole = rings.filter((r) => r.ring === "hole");
    expect(hole).toHaveLength(1);
    expect(hole[0]!.color).toBe(HOLE_HANDLE_COLOR);
    expect(hole[0]!.count).toBe(3);
    expect(hole[0]!.slice).toBe(1);
  });

  it("skips items hidden via view state or document flags", () => {
    const doc = makeDocument();
    let view = initialView();
    view = toggleHidden(view, "obj");
    let items = sceneItems(doc, view);
    expect(handles(items)).toHaveLength(0);
    expect(items.filter((i) => i.type === "cloud")).toHaveLength(1);

    doc.flags["c"] = { visible: false, locked: false };
    items = sceneItems(doc, initialView());
    expect(items.filter((i) => i.type === "cloud")).toHaveLength(0);
    expect(handles(items)).toHaveLength(4);
  });

  it("marks locked items non-interactive", () => {
    const doc = makeDocument();
    doc.flags["obj"] = { visible: true, locked: true };
    const rings = handles(sceneItems(doc, initialView()));
    expect(rings.every((r) => r.locked)).toBe(true);
  });

  it("ghosts the most recent waypoint of each visible path", () => {
    const doc = makeDocument();
    doc.paths["p"] = {
      poses: [
        { position: [0, 0, 0], orientation: [1, 0, 0, 0] },
        { position: [0, 0, 1], orientation: [1, 0, 0, 0] },
        { position: [0, 1, 1], orientation: [1, 0, 0, 0] },
      ],
      timestamps: null,
      object_ref: "obj",
    };
    const items = sceneItems(doc, initialView());
    const ghosts = items.filter((i) => i.type === "waypoint-ghost");
    expect(ghosts).toEqual([{ type: "waypoint-ghost", path: "p", index: 2 }]);
  });
});
