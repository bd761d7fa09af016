/** Knowledge Explorer: facet form, results table, suppression banner. */

import { beforeEach, describe, expect, it } from "vitest";

import { CagApi, SearchResponse } from "../src/api.js";
import { CanvasState } from "../src/state.js";
import { KnowledgeExplorer } from "../src/explorer.js";
import { RecordedRequest, statement } from "./helpers.js";

function searchServer(response: SearchResponse) {
  const requests: RecordedRequest[] = [];
  const materialized: unknown[] = [];
  const fetcher = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const path = (typeof input === "string" ? input : input.toString()).replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    requests.push({ method: init?.method ?? "GET", path, body });
    if (path.startsWith("/search")) {
      return new Response(JSON.stringify(response), { status: 200 });
    }
    if (path.endsWith("/materialize")) {
      materialized.push(body);
      return new Response(JSON.stringify({ version: 9, report: { added_edges: [] } }), { status: 200 });
    }
    if (path.startsWith("/cags/")) {
      return new Response(
        JSON.stringify({ id: "m1", name: "m", created_at: "", acyclicity: "enforced", version: 9, nodes: [], edges: [] }),
        { status: 200 },
      );
    }
    throw new Error(`no route: ${path}`);
  };
  return { fetcher, requests, materialized };
}

describe("knowledge explorer", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="explorer"></div>';
    root = document.querySelector("#explorer")!;
  });

  const baseResponse: SearchResponse = {
    statement_ids: ["s1", "s2"],
    total: 2,
    facet_counts: {},
    statements: [
      statement("s1", "wm/env/drought", "wm/ag/crops", -1, 0.8),
      statement("s2", "wm/ag/crops", "wm/food/supply", 1, 0.5),
    ],
    nested: {
      compartments: {
        "wm/env": [{ concept: "wm/env/drought", count: 1 }],
        "wm/ag": [{ concept: "wm/ag/crops", count: 2 }],
      },
      edges: [
        { subj: "wm/env/drought", obj: "wm/ag/crops", polarity: "opposite", belief: 0.8, support: 1 },
      ],
      layout: {
        compartments: { "wm/env": { x: 0, y: 0, width: 100, height: 80 }, "wm/ag": { x: 160, y: 0, width: 100, height: 80 } },
        nodes: {
          "wm/env/drought": { x: 20, y: 30, width: 40, height: 40 },
          "wm/ag/crops": { x: 180, y: 30, width: 48, height: 48 },
        },
        edges: [{ subj: "wm/env/drought", obj: "wm/ag/crops", points: [[60, 50], [180, 50]], clipped: false }],
        canvas: { x: 0, y: 0, width: 280, height: 100 },
      },
    },
  };

  it("renders three facet groups and a sortable table", async () => {
    const { fetcher } = searchServer(baseResponse);
    const explorer = new KnowledgeExplorer(new CagApi("", fetcher), new CanvasState());
    explorer.mount(root);
    expect(root.querySelector(".facet-doc")).toBeTruthy();
    expect(root.querySelector(".facet-rel")).toBeTruthy();
    expect(root.querySelector(".facet-factor")).toBeTruthy();

    await explorer.runSearch({ rel: { polarities: [-1] } });
    const rows = root.querySelectorAll(".result-table tbody tr");
    expect(rows.length).toBe(2);
    // default sort: belief descending
    expect(rows[0].getAttribute("data-statement-id")).toBe("s1");
    expect(root.querySelector(".result-total")!.textContent).toBe("2 statements");
  });

  it("builds the facet query from the form fields", () => {
    const { fetcher } = searchServer(baseResponse);
    const explorer = new KnowledgeExplorer(new CagApi("", fetcher), new CanvasState());
    explorer.mount(root);
    const form = root.querySelector("form") as HTMLFormElement;
    (form.elements.namedItem("min_evidence") as HTMLInputElement).value = "3";
    (form.querySelector('input[name=polarity][value="-1"]') as HTMLInputElement).checked = true;
    (form.elements.namedItem("concepts") as HTMLInputElement).value = "wm/env/drought, wm/social/conflict";
    (form.elements.namedItem("region") as HTMLInputElement).value = "Africa/Eastern Africa";
    expect(explorer.queryFromForm(form)).toEqual({
      rel: { polarities: [-1], min_evidence: 3 },
      factor: {
        concepts: ["wm/env/drought", "wm/social/conflict"],
        region_prefix: "Africa/Eastern Africa",
      },
    });
  });

  it("draws the nested graph from server geometry", async () => {
    const { fetcher } = searchServer(baseResponse);
    const explorer = new KnowledgeExplorer(new CagApi("", fetcher), new CanvasState());
    explorer.mount(root);
    await explorer.runSearch({});
    expect(root.querySelectorAll(".compartment").length).toBe(2);
    expect(root.querySelectorAll(".nested-node").length).toBe(2);
    const edge = root.querySelector<SVGPolylineElement>(".nested-edge")!;
    expect(edge.getAttribute("stroke")).toBe("#b2182b");
    expect(root.querySelector(".edges-hidden-banner")).toBeNull();
  });

  it("shows the hidden-edges banner when the server suppresses", async () => {
    const suppressed: SearchResponse = {
      ...baseResponse,
      nested: {
        compartments: baseResponse.nested!.compartments,
        edges: "SUPPRESSED",
        suppressed_edge_count: 2345,
        layout: { ...baseResponse.nested!.layout!, edges: "SUPPRESSED" },
      },
    };
    const { fetcher } = searchServer(suppressed);
    const explorer = new KnowledgeExplorer(new CagApi("", fetcher), new CanvasState());
    explorer.mount(root);
    await explorer.runSearch({});
    const banner = root.querySelector(".edges-hidden-banner")!;
    expect(banner.textContent).toBe("edges hidden (2345)");
    expect(root.querySelectorAll(".nested-edge").length).toBe(0);
  });

  it("materializes the result into the tracked model with the version", async () => {
    const { fetcher, requests } = searchServer(baseResponse);
    const state = new CanvasState();
    state.trackModel("m1", 7);
    const explorer = new KnowledgeExplorer(new CagApi("", fetcher), state);
    explorer.mount(root);
    await explorer.runSearch({});
    await explorer.materializeSelection();
    const request = requests.find((r) => r.path.endsWith("/materialize"))!;
    expect(request.body).toEqual({
      statement_ids: ["s1", "s2"],
      selected_pairs: undefined,
      version: 7,
    });
    expect(state.version).toBe(9);
  });
});
