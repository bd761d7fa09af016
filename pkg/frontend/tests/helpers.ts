/** In-memory fake of the REST API for DOM-level tests.
 *
 * The fake owns all aggregation results; tests mutate its canned state the
 * way the real engine would, which is exactly what keeps the "UI never
 * aggregates locally" invariant checkable.
 */

import { EdgePayload, ModelPayload, StatementPayload } from "../src/api.js";

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
}

export class FakeServer {
  requests: RecordedRequest[] = [];
  statements = new Map<string, StatementPayload>();
  model: ModelPayload;
  /** Applied when a curation batch arrives, mimicking server re-aggregation. */
  onCurate: (body: { actions: { kind: string; payload: Record<string, unknown> }[] }) => void =
    () => {};

  constructor(model: ModelPayload) {
    this.model = model;
  }

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = typeof input === "string" ? input : input.toString();
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    this.requests.push({ method, path, body });

    const respond = (payload: unknown, status = 200) =>
      new Response(JSON.stringify(payload), {
        status,
        headers: { "Content-Type": "application/json" },
      });

    if (path.startsWith("/cags/") && path.endsWith("/curations") && method === "POST") {
      const expected = (body as { version?: number }).version;
      if (expected !== undefined && expected !== this.model.version) {
        return respond(
          {
            error: {
              code: "VERSION_CONFLICT",
              message: "stale version",
              details: { expected, actual: this.model.version },
            },
          },
          409,
        );
      }
      this.onCurate(body);
      this.model.version += (body.actions as unknown[]).length;
      return respond({ version: this.model.version, report: { polarity_changes: [] } });
    }
    if (path.startsWith("/statements/")) {
      const id = decodeURIComponent(path.split("/").pop()!);
      const statement = this.statements.get(id);
      if (!statement) {
        return respond({ error: { code: "UNKNOWN_STATEMENT", message: id, details: {} } }, 404);
      }
      return respond(statement);
    }
    if (path.startsWith("/cags/") && method === "GET" && path.split("/").length === 3) {
      return respond(this.model);
    }
    if (path === "/cags" && method === "GET") {
      return respond({ total: 1, models: [summary(this.model)] });
    }
    throw new Error(`FakeServer has no route for ${method} ${path}`);
  };
}

function summary(model: ModelPayload) {
  return {
    id: model.id,
    name: model.name,
    created_at: model.created_at,
    version: model.version,
    nodes: model.nodes.length,
    edges: model.edges.length,
  };
}

export function edge(
  subj: string,
  obj: string,
  polarity: EdgePayload["polarity"],
  belief: number,
  statementIds: string[] = [],
  counts = { same: 0, opposite: 0, unknown: 0 },
): EdgePayload {
  return {
    subj,
    obj,
    polarity,
    belief,
    counts,
    evidence_count: statementIds.length,
    statement_ids: statementIds,
    override: null,
  };
}

export function statement(
  id: string,
  subj: string,
  obj: string,
  polarity: 1 | -1 | 0,
  belief: number,
  discarded = false,
): StatementPayload {
  return {
    id,
    subj: { concept: subj, text: subj.split("/").pop()! },
    obj: { concept: obj, text: obj.split("/").pop()! },
    polarity,
    belief,
    discarded,
    evidence: [{ doc_id: `doc-${id}`, text: `evidence for ${id}`, source: "FAO", date: null }],
    context: { region: null, lat: null, lon: null, start: null, end: null },
  };
}

export function fixtureModel(): ModelPayload {
  const nodes = ["wm/a", "wm/b", "wm/c", "wm/d", "wm/e"].map((concept) => ({
    concept,
    display: concept.split("/").pop()!.toUpperCase(),
  }));
  const edges = [
    edge("wm/a", "wm/b", "same", 0.9, ["s1"], { same: 1, opposite: 0, unknown: 0 }),
    edge("wm/b", "wm/c", "opposite", 0.8, ["s2"], { same: 0, opposite: 1, unknown: 0 }),
    edge("wm/c", "wm/d", "ambiguous", 0.7, ["s3", "s4"], { same: 1, opposite: 1, unknown: 0 }),
    edge("wm/d", "wm/e", "no_evidence", 0.0, []),
  ];
  const boxes: Record<string, { x: number; y: number; width: number; height: number }> = {};
  ["wm/a", "wm/b", "wm/c", "wm/d", "wm/e"].forEach((concept, i) => {
    boxes[concept] = { x: 180 * i, y: 40, width: 120, height: 40 };
  });
  return {
    id: "cag-fixture",
    name: "fixture",
    created_at: "2026-01-01T00:00:00Z",
    acyclicity: "enforced",
    version: 5,
    nodes,
    edges,
    layout: {
      nodes: boxes,
      edges: edges.map((e) => ({
        subj: e.subj,
        obj: e.obj,
        points: [
          [boxes[e.subj].x + 120, 60],
          [boxes[e.obj].x, 60],
        ] as [number, number][],
        clipped: false,
      })),
      canvas: { x: 0, y: 0, width: 960, height: 140 },
    },
  };
}
