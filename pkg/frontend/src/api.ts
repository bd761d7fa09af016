/**
 * Typed client for the cagkit REST API.
 *
 * All aggregation-derived values (edge polarity, belief, counts) come from
 * the server; nothing in the client recomputes them. Mutations carry the
 * caller's known model version and surface VERSION_CONFLICT so views can
 * refetch.
 */

export type PolarityLabel = "same" | "opposite" | "ambiguous" | "no_evidence";

export interface EdgePayload {
  subj: string;
  obj: string;
  polarity: PolarityLabel;
  belief: number;
  counts: { same: number; opposite: number; unknown: number };
  evidence_count: number;
  statement_ids: string[];
  override: 1 | -1 | null;
}

export interface NodePayload {
  concept: string;
  display: string;
}

export interface BoxPayload {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface RoutePayload {
  subj: string;
  obj: string;
  points: [number, number][];
  clipped: boolean;
}

export interface LayoutPayload {
  nodes: Record<string, BoxPayload>;
  edges: RoutePayload[];
  canvas: BoxPayload;
}

export interface ModelPayload {
  id: string;
  name: string;
  created_at: string;
  acyclicity: string;
  version: number;
  nodes: NodePayload[];
  edges: EdgePayload[];
  layout?: LayoutPayload;
}

export interface ModelSummary {
  id: string;
  name: string;
  created_at: string;
  version: number;
  nodes: number;
  edges: number;
}

export interface StatementPayload {
  id: string;
  subj: { concept: string; text: string };
  obj: { concept: string; text: string };
  polarity: 1 | -1 | 0;
  belief: number;
  discarded: boolean;
  evidence: { doc_id: string; text: string; source: string; date: string | null }[];
  context: {
    region: string | null;
    lat: number | null;
    lon: number | null;
    start: string | null;
    end: string | null;
  };
}

export interface ConceptSuggestion {
  concept: string;
  display: string;
  statement_count: number;
}

export interface RelationshipSuggestion {
  subj: string;
  obj: string;
  support: number;
  polarity: PolarityLabel;
}

export interface FacetQueryBody {
  doc?: { doc_ids?: string[]; sources?: string[]; year_range?: [number, number] };
  rel?: { polarities?: number[]; min_evidence?: number; min_belief?: number };
  factor?: {
    concepts?: string[];
    exact?: boolean;
    region_prefix?: string;
    time_overlap?: [string, string];
  };
}

export interface NestedPayload {
  compartments: Record<string, { concept: string; count: number }[]>;
  edges: "SUPPRESSED" | { subj: string; obj: string; polarity: PolarityLabel; belief: number; support: number }[];
  suppressed_edge_count?: number;
  layout?: {
    compartments: Record<string, BoxPayload>;
    nodes: Record<string, BoxPayload>;
    edges: "SUPPRESSED" | RoutePayload[];
    canvas: BoxPayload;
  };
}

export interface SearchResponse {
  statement_ids: string[];
  total: number;
  facet_counts: Record<string, Record<string, number>>;
  statements: StatementPayload[];
  nested?: NestedPayload;
}

export interface MergeReportPayload {
  imported_models: string[];
  node_matches: { a: string; b: string; score: number; recommendation: string }[];
  ambiguous_edges: [string, string][];
  skipped_edges: { subj: string; obj: string; cycle: string[] }[];
}

export interface CurationActionBody {
  kind: string;
  payload: Record<string, unknown>;
}

export interface MutationReportPayload {
  polarity_changes: { subj: string; obj: string; before: PolarityLabel; after: PolarityLabel }[];
  added_edges: [string, string][];
  skipped_edges: { subj: string; obj: string; cycle: string[] }[];
  dropped_self_loops: [string, string][];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: Record<string, unknown> = {},
  ) {
    super(message);
  }
}

/** Encode a slash-bearing concept id for use inside a URL path. */
export function encodeConcept(conceptId: string): string {
  return encodeURIComponent(conceptId);
}

export class CagApi {
  constructor(
    private base: string = "",
    private fetcher: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetcher(this.base + path, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    if (response.status === 204) {
      return undefined as T;
    }
    const payload = await response.json();
    if (!response.ok) {
      const err = payload?.error ?? {};
      throw new ApiError(
        response.status,
        err.code ?? "UNKNOWN",
        err.message ?? response.statusText,
        err.details ?? {},
      );
    }
    return payload as T;
  }

  health(): Promise<{ status: string; statements: number; concepts: number }> {
    return this.request("GET", "/health");
  }

  listModels(): Promise<{ total: number; models: ModelSummary[] }> {
    return this.request("GET", "/cags");
  }

  createModel(name: string): Promise<ModelSummary> {
    return this.request("POST", "/cags", { name });
  }

  getModel(modelId: string): Promise<ModelPayload> {
    return this.request("GET", `/cags/${modelId}`);
  }

  suggestConcepts(q: string, k = 10): Promise<{ suggestions: ConceptSuggestion[] }> {
    return this.request("GET", `/concepts/suggest?q=${encodeURIComponent(q)}&k=${k}`);
  }

  suggestRelationships(
    concept: string,
    k = 5,
  ): Promise<{ incoming: RelationshipSuggestion[]; outgoing: RelationshipSuggestion[] }> {
    return this.request("GET", `/concepts/${encodeConcept(concept)}/relationships/suggest?k=${k}`);
  }

  paths(source: string, target: string, maxHops = 2): Promise<{ paths: { concepts: string[]; hop_support: number[] }[] }> {
    const qs = `source=${encodeURIComponent(source)}&target=${encodeURIComponent(target)}&max_hops=${maxHops}`;
    return this.request("GET", `/paths?${qs}`);
  }

  statement(statementId: string): Promise<StatementPayload> {
    return this.request("GET", `/statements/${statementId}`);
  }

  addNode(modelId: string, concept: string, version?: number): Promise<ModelSummary> {
    return this.request("POST", `/cags/${modelId}/nodes`, { concept, version });
  }

  addEdge(
    modelId: string,
    subject: string,
    object: string,
    version?: number,
  ): Promise<{ version: number; edge: EdgePayload }> {
    return this.request("POST", `/cags/${modelId}/edges`, { subject, object, version });
  }

  deleteEdge(modelId: string, subj: string, obj: string, version?: number): Promise<ModelSummary> {
    const suffix = version !== undefined ? `?version=${version}` : "";
    return this.request(
      "DELETE",
      `/cags/${modelId}/edges/${encodeConcept(subj)}/${encodeConcept(obj)}${suffix}`,
    );
  }

  setOverride(
    modelId: string,
    subj: string,
    obj: string,
    override: 1 | -1 | null,
    version?: number,
  ): Promise<{ version: number; edge: EdgePayload }> {
    return this.request(
      "POST",
      `/cags/${modelId}/edges/${encodeConcept(subj)}/${encodeConcept(obj)}/override`,
      { override, version },
    );
  }

  curate(
    modelId: string,
    actions: CurationActionBody[],
    version?: number,
  ): Promise<{ version: number; report: MutationReportPayload }> {
    return this.request("POST", `/cags/${modelId}/curations`, { actions, version });
  }

  search(query: FacetQueryBody, view?: "nested", limit = 100): Promise<SearchResponse> {
    const qs = view ? `?view=${view}&limit=${limit}` : `?limit=${limit}`;
    return this.request("POST", `/search${qs}`, query);
  }

  materialize(
    modelId: string,
    statementIds: string[],
    selectedPairs?: [string, string][],
    version?: number,
  ): Promise<{ version: number; report: MutationReportPayload }> {
    return this.request("POST", `/cags/${modelId}/materialize`, {
      statement_ids: statementIds,
      selected_pairs: selectedPairs,
      version,
    });
  }

  importModels(
    modelId: string,
    sources: string[],
    version?: number,
  ): Promise<{ version: number; report: MergeReportPayload }> {
    return this.request("POST", `/cags/${modelId}/import`, { sources, version });
  }

  duplicates(modelId: string, threshold?: number): Promise<{ matches: MergeReportPayload["node_matches"] }> {
    const qs = threshold !== undefined ? `?threshold=${threshold}` : "";
    return this.request("GET", `/cags/${modelId}/duplicates${qs}`);
  }

  mergeNodes(
    modelId: string,
    survivor: string,
    absorbed: string,
    version?: number,
  ): Promise<{ version: number; report: MutationReportPayload }> {
    return this.request("POST", `/cags/${modelId}/merge-nodes`, { survivor, absorbed, version });
  }
}
