/** Curation round-trip: the edge recolors per the server's re-aggregation. */

import { beforeEach, describe, expect, it } from "vitest";

import { CagApi } from "../src/api.js";
import { CanvasState } from "../src/state.js";
import { CagCanvas } from "../src/render.js";
import { EvidencePanel } from "../src/evidence.js";
import { FakeServer, edge, fixtureModel, statement } from "./helpers.js";

function flushPromises(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

describe("evidence panel curation round-trip", () => {
  let canvasRoot: HTMLElement;
  let panelRoot: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="canvas"></div><div id="side-panel"></div>';
    canvasRoot = document.querySelector("#canvas")!;
    panelRoot = document.querySelector("#side-panel")!;
  });

  function ambiguousFixture() {
    const model = fixtureModel();
    // one ambiguous edge backed by one same + one opposite statement
    model.edges = [
      edge("wm/a", "wm/b", "ambiguous", 0.9, ["s-same", "s-opp"], {
        same: 1,
        opposite: 1,
        unknown: 0,
      }),
    ];
    model.layout!.edges = [
      { subj: "wm/a", obj: "wm/b", points: [[120, 60], [180, 60]], clipped: false },
    ];
    const server = new FakeServer(model);
    server.statements.set("s-same", statement("s-same", "wm/a", "wm/b", 1, 0.6));
    server.statements.set("s-opp", statement("s-opp", "wm/a", "wm/b", -1, 0.9));
    // the fake server re-aggregates: discarding the same-polarity statement
    // leaves a unanimous opposite edge
    server.onCurate = (body) => {
      for (const action of body.actions) {
        if (action.kind !== "DiscardStatement") continue;
        const ids = action.payload.statement_ids as string[];
        for (const sid of ids) {
          const s = server.statements.get(sid)!;
          server.statements.set(sid, { ...s, discarded: true });
        }
        const active = [...server.statements.values()].filter((s) => !s.discarded);
        const polarity = active.every((s) => s.polarity === -1)
          ? ("opposite" as const)
          : ("ambiguous" as const);
        const maxBelief = Math.max(0, ...active.map((s) => s.belief));
        server.model.edges = [
          edge(
            "wm/a",
            "wm/b",
            polarity,
            maxBelief,
            active.map((s) => s.id),
            {
              same: active.filter((s) => s.polarity === 1).length,
              opposite: active.filter((s) => s.polarity === -1).length,
              unknown: 0,
            },
          ),
        ];
      }
    };
    return server;
  }

  it("bulk discard recolors the edge to what the server reports", async () => {
    const server = ambiguousFixture();
    const api = new CagApi("", server.fetch);
    const state = new CanvasState();
    state.trackModel(server.model.id, server.model.version);

    const panel = new EvidencePanel(api, state, {
      onModelChanged: (model) => canvas.render(model),
    });
    const canvas = new CagCanvas(api, state, {
      onSelectEdge: (e) => void panel.showEdge(e),
    });
    canvas.mount(canvasRoot);
    panel.mount(panelRoot);
    canvas.render(server.model);

    // the edge starts gray (ambiguous), per the server
    let line = canvasRoot.querySelector<SVGPolylineElement>(".cag-edge")!;
    expect(line.getAttribute("stroke")).toBe("#8c8c8c");

    // open the panel and bulk-discard the same-polarity statement
    line.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flushPromises();
    const row = panelRoot.querySelector<HTMLElement>('[data-statement-id="s-same"]')!;
    const checkbox = row.querySelector<HTMLInputElement>("input[type=checkbox]")!;
    checkbox.checked = true;
    checkbox.dispatchEvent(new Event("change"));
    panelRoot.querySelector<HTMLButtonElement>(".bulk-discard")!.click();
    await flushPromises();
    await flushPromises();

    // exactly one atomic curation request went out, carrying the version
    const curations = server.requests.filter((r) => r.path.endsWith("/curations"));
    expect(curations.length).toBe(1);
    expect((curations[0].body as { version: number }).version).toBe(5);
    expect((curations[0].body as { actions: unknown[] }).actions).toEqual([
      { kind: "DiscardStatement", payload: { statement_ids: ["s-same"] } },
    ]);

    // the canvas now shows the server's re-aggregated polarity: solid red
    line = canvasRoot.querySelector<SVGPolylineElement>(".cag-edge")!;
    expect(line.getAttribute("stroke")).toBe("#b2182b");
    expect(line.getAttribute("stroke-dasharray")).toBeNull();
    expect(Number(line.getAttribute("stroke-opacity"))).toBeCloseTo(0.35 + 0.65 * 0.9, 5);
    expect(state.version).toBe(6);
  });

  it("shows a refresh prompt on a stale version (409)", async () => {
    const server = ambiguousFixture();
    const api = new CagApi("", server.fetch);
    const state = new CanvasState();
    state.trackModel(server.model.id, 3); // deliberately stale

    const panel = new EvidencePanel(api, state);
    panel.mount(panelRoot);
    await panel.showEdge(server.model.edges[0]);
    const row = panelRoot.querySelector<HTMLElement>('[data-statement-id="s-opp"]')!;
    row.querySelector<HTMLButtonElement>(".discard-one")!.click();
    await flushPromises();
    await flushPromises();

    expect(panelRoot.querySelector(".stale-version")).toBeTruthy();
    // no server-side change happened
    expect(server.model.version).toBe(5);
  });

  it("has no aggregation code path: panel header mirrors payload verbatim", async () => {
    const server = ambiguousFixture();
    // hand the panel an edge whose polarity contradicts its counts; the
    // header must echo the payload, proving nothing recomputes it
    const contradictory = edge("wm/a", "wm/b", "same", 0.4, ["s-opp"], {
      same: 0,
      opposite: 5,
      unknown: 0,
    });
    const api = new CagApi("", server.fetch);
    const state = new CanvasState();
    state.trackModel(server.model.id, server.model.version);
    const panel = new EvidencePanel(api, state);
    panel.mount(panelRoot);
    await panel.showEdge(contradictory);
    const header = panelRoot.querySelector<HTMLElement>(".edge-header")!;
    expect(header.dataset.polarity).toBe("same");
    expect(header.textContent).toContain("belief 0.4");
  });
});
