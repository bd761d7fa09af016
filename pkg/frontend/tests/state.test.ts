import { describe, expect, it } from "vitest";

import { CanvasState, MAX_ZOOM, MIN_ZOOM } from "../src/state.js";

describe("canvas state", () => {
  it("clamps zoom to the allowed range", () => {
    const state = new CanvasState();
    state.setZoom(0.01);
    expect(state.zoom).toBe(MIN_ZOOM);
    state.setZoom(9);
    expect(state.zoom).toBe(MAX_ZOOM);
    state.setZoom(1.5);
    expect(state.zoom).toBe(1.5);
  });

  it("drops selection and pending drag when switching models", () => {
    const state = new CanvasState();
    state.trackModel("m1", 3);
    state.select({ kind: "node", concept: "wm/a" });
    state.pendingDrag = { fromConcept: "wm/a", x: 0, y: 0 };
    state.trackModel("m1", 4); // same model: selection survives a version bump
    expect(state.selection).toEqual({ kind: "node", concept: "wm/a" });
    state.trackModel("m2", 1);
    expect(state.selection).toEqual({ kind: "none" });
    expect(state.pendingDrag).toBeNull();
    expect(state.version).toBe(1);
  });
});
