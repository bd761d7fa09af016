/** Encoding conformance: stroke per polarity, straight from the payload. */

import { beforeEach, describe, expect, it } from "vitest";

import { CagApi } from "../src/api.js";
import { CanvasState } from "../src/state.js";
import { CagCanvas, POLARITY_STROKES, edgeStrokeAttributes } from "../src/render.js";
import { FakeServer, fixtureModel, edge } from "./helpers.js";

describe("CAG canvas encoding", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="canvas"></div>';
    root = document.querySelector("#canvas")!;
  });

  function renderFixture() {
    const server = new FakeServer(fixtureModel());
    const api = new CagApi("", server.fetch);
    const canvas = new CagCanvas(api, new CanvasState());
    canvas.mount(root);
    canvas.render(server.model);
    return { server, canvas };
  }

  it("draws blue solid, red solid, gray solid, and dotted black strokes", () => {
    renderFixture();
    const byPolarity = (polarity: string) =>
      root.querySelector<SVGPolylineElement>(`.cag-edge[data-polarity="${polarity}"]`)!;

    const same = byPolarity("same");
    expect(same.getAttribute("stroke")).toBe("#2166ac");
    expect(same.getAttribute("stroke-dasharray")).toBeNull();

    const opposite = byPolarity("opposite");
    expect(opposite.getAttribute("stroke")).toBe("#b2182b");
    expect(opposite.getAttribute("stroke-dasharray")).toBeNull();

    const ambiguous = byPolarity("ambiguous");
    expect(ambiguous.getAttribute("stroke")).toBe("#8c8c8c");
    expect(ambiguous.getAttribute("stroke-dasharray")).toBeNull();

    const noEvidence = byPolarity("no_evidence");
    expect(noEvidence.getAttribute("stroke")).toBe("#000000");
    expect(noEvidence.getAttribute("stroke-dasharray")).toBe("6,4");
  });

  it("scales stroke opacity with the server's aggregate belief", () => {
    renderFixture();
    const same = root.querySelector<SVGPolylineElement>('.cag-edge[data-polarity="same"]')!;
    const none = root.querySelector<SVGPolylineElement>('.cag-edge[data-polarity="no_evidence"]')!;
    expect(Number(same.getAttribute("stroke-opacity"))).toBeCloseTo(0.35 + 0.65 * 0.9, 5);
    expect(Number(none.getAttribute("stroke-opacity"))).toBeCloseTo(0.35, 5);
  });

  it("renders the polarity the server sent even when counts disagree", () => {
    // counts say unanimous-same, but the server says opposite (e.g. an
    // override it resolved); the client must not second-guess it
    const model = fixtureModel();
    model.edges = [
      edge("wm/a", "wm/b", "opposite", 0.5, ["s1"], { same: 3, opposite: 0, unknown: 0 }),
    ];
    const server = new FakeServer(model);
    const canvas = new CagCanvas(new CagApi("", server.fetch), new CanvasState());
    canvas.mount(root);
    canvas.render(server.model);
    const line = root.querySelector<SVGPolylineElement>(".cag-edge")!;
    expect(line.getAttribute("stroke")).toBe(POLARITY_STROKES.opposite);
  });

  it("uses server geometry for node boxes and routes", () => {
    renderFixture();
    const nodes = root.querySelectorAll(".cag-node rect");
    expect(nodes.length).toBe(5);
    const first = root.querySelector<SVGRectElement>('.cag-node[data-concept="wm/a"] rect')!;
    expect(first.getAttribute("x")).toBe("0");
    expect(first.getAttribute("width")).toBe("120");
    const route = root.querySelector<SVGPolylineElement>('.cag-edge[data-subj="wm/a"]')!;
    expect(route.getAttribute("points")).toBe("120,60 180,60");
  });

  it("opens the concept search on demand", () => {
    const { canvas } = renderFixture();
    canvas.openConceptSearch();
    expect(root.querySelector(".concept-search input")).toBeTruthy();
  });
});

describe("edgeStrokeAttributes", () => {
  it("is a pure mapping of payload fields", () => {
    expect(edgeStrokeAttributes({ polarity: "same", belief: 1 })).toEqual({
      stroke: "#2166ac",
      strokeOpacity: "1.000",
      strokeDasharray: null,
    });
    expect(edgeStrokeAttributes({ polarity: "no_evidence", belief: 0 })).toEqual({
      stroke: "#000000",
      strokeOpacity: "0.350",
      strokeDasharray: "6,4",
    });
  });
});
