/**
 * Evidence side panel for a selected edge: statements with their evidence,
 * per-statement and bulk curation actions, and the relationship-suggestions
 * tab. Edge polarity/belief shown here are whatever the server last said;
 * after any curation the panel re-reads the model rather than recomputing.
 */

import {
  ApiError,
  CagApi,
  CurationActionBody,
  EdgePayload,
  ModelPayload,
  StatementPayload,
} from "./api.js";
import { CanvasState } from "./state.js";
import { edgeStrokeAttributes } from "./render.js";

export interface EvidencePanelCallbacks {
  onModelChanged?: (model: ModelPayload) => void;
  onStaleVersion?: () => void;
}

export class EvidencePanel {
  private root: HTMLElement | null = null;
  private edge: EdgePayload | null = null;
  private checked = new Set<string>();

  constructor(
    private api: CagApi,
    private state: CanvasState,
    private callbacks: EvidencePanelCallbacks = {},
  ) {}

  mount(root: HTMLElement): void {
    this.root = root;
  }

  async showEdge(edge: EdgePayload): Promise<void> {
    if (!this.root) throw new Error("panel not mounted");
    this.edge = edge;
    this.checked.clear();
    const statements: StatementPayload[] = [];
    for (const sid of edge.statement_ids) {
      statements.push(await this.api.statement(sid));
    }
    this.renderStatements(edge, statements);
  }

  private renderStatements(edge: EdgePayload, statements: StatementPayload[]): void {
    const root = this.root!;
    root.textContent = "";

    const header = document.createElement("header");
    header.className = "edge-header";
    const style = edgeStrokeAttributes(edge);
    header.dataset.polarity = edge.polarity;
    header.style.borderColor = style.stroke;
    header.textContent = `${edge.subj} → ${edge.obj} (${edge.polarity}, belief ${edge.belief})`;
    root.appendChild(header);

    const tabs = document.createElement("nav");
    const evidenceTab = document.createElement("button");
    evidenceTab.textContent = "Evidence";
    evidenceTab.className = "tab active";
    const suggestionsTab = document.createElement("button");
    suggestionsTab.textContent = "Suggestions";
    suggestionsTab.className = "tab";
    suggestionsTab.addEventListener("click", () => this.showSuggestions());
    tabs.append(evidenceTab, suggestionsTab);
    root.appendChild(tabs);

    const list = document.createElement("ul");
    list.className = "statements";
    for (const s of statements) {
      const item = document.createElement("li");
      item.dataset.statementId = s.id;
      item.dataset.discarded = String(s.discarded);

      const pick = document.createElement("input");
      pick.type = "checkbox";
      pick.addEventListener("change", () => {
        if (pick.checked) this.checked.add(s.id);
        else this.checked.delete(s.id);
      });
      item.appendChild(pick);

      const body = document.createElement("div");
      const headline = document.createElement("strong");
      headline.textContent = `${s.subj.text || s.subj.concept} → ${s.obj.text || s.obj.concept}`;
      body.appendChild(headline);
      const meta = document.createElement("small");
      meta.textContent = ` polarity ${s.polarity}, belief ${s.belief}`;
      body.appendChild(meta);
      for (const ev of s.evidence) {
        const quote = document.createElement("blockquote");
        quote.textContent = ev.text;
        const source = document.createElement("cite");
        source.textContent = ev.source || ev.doc_id;
        quote.appendChild(source);
        const link = document.createElement("a");
        link.textContent = "open source document";
        link.href = `/documents/${encodeURIComponent(ev.doc_id)}`;
        link.className = "doc-link";
        quote.appendChild(link);
        body.appendChild(quote);
      }
      item.appendChild(body);

      const discard = document.createElement("button");
      discard.className = "discard-one";
      discard.textContent = s.discarded ? "restore" : "discard";
      discard.addEventListener("click", () =>
        this.curate([
          {
            kind: s.discarded ? "RestoreStatement" : "DiscardStatement",
            payload: { statement_ids: [s.id] },
          },
        ]),
      );
      item.appendChild(discard);

      const flip = document.createElement("button");
      flip.className = "flip-one";
      flip.textContent = "flip polarity";
      flip.addEventListener("click", () =>
        this.curate([
          {
            kind: "SetStatementPolarity",
            payload: { statement_ids: [s.id], polarity: s.polarity === 1 ? -1 : 1 },
          },
        ]),
      );
      item.appendChild(flip);
      list.appendChild(item);
    }
    root.appendChild(list);

    const bulk = document.createElement("div");
    bulk.className = "bulk-actions";
    const bulkDiscard = document.createElement("button");
    bulkDiscard.className = "bulk-discard";
    bulkDiscard.textContent = "Discard selected";
    bulkDiscard.addEventListener("click", () => {
      if (this.checked.size) {
        void this.curate([
          { kind: "DiscardStatement", payload: { statement_ids: [...this.checked].sort() } },
        ]);
      }
    });
    bulk.appendChild(bulkDiscard);

    const remapInput = document.createElement("input");
    remapInput.className = "remap-target";
    remapInput.placeholder = "re-ground selected to concept...";
    const remapButton = document.createElement("button");
    remapButton.className = "bulk-remap";
    remapButton.textContent = "Remap";
    remapButton.addEventListener("click", () => {
      const target = remapInput.value.trim();
      if (target && this.checked.size && this.edge) {
        void this.curate([
          {
            kind: "RemapConcept",
            payload: {
              statement_ids: [...this.checked].sort(),
              from_concept: this.edge.subj,
              to_concept: target,
            },
          },
        ]);
      }
    });
    bulk.append(remapInput, remapButton);
    root.appendChild(bulk);
  }

  /** One atomic request per user gesture; edge recolors from the response. */
  private async curate(actions: CurationActionBody[]): Promise<void> {
    if (!this.edge || !this.state.modelId) return;
    try {
      const { version } = await this.api.curate(this.state.modelId, actions, this.state.version);
      this.state.version = version;
      const model = await this.api.getModel(this.state.modelId);
      this.state.trackModel(model.id, model.version);
      const updated = model.edges.find(
        (e) => e.subj === this.edge!.subj && e.obj === this.edge!.obj,
      );
      if (updated) {
        await this.showEdge(updated);
      } else if (this.root) {
        this.root.textContent = "";
      }
      this.callbacks.onModelChanged?.(model);
    } catch (error) {
      if (error instanceof ApiError && error.code === "VERSION_CONFLICT") {
        this.renderStalePrompt();
        this.callbacks.onStaleVersion?.();
        return;
      }
      throw error;
    }
  }

  private renderStalePrompt(): void {
    if (!this.root) return;
    const prompt = document.createElement("div");
    prompt.className = "stale-version";
    prompt.textContent = "This model changed elsewhere; refresh to continue.";
    const refresh = document.createElement("button");
    refresh.textContent = "Refresh";
    refresh.addEventListener("click", async () => {
      if (this.state.modelId) {
        const model = await this.api.getModel(this.state.modelId);
        this.state.trackModel(model.id, model.version);
        prompt.remove();
        this.callbacks.onModelChanged?.(model);
      }
    });
    prompt.appendChild(refresh);
    this.root.appendChild(prompt);
  }

  async showSuggestions(): Promise<void> {
    if (!this.root || !this.state.modelId) return;
    const selection = this.state.selection;
    const concept =
      selection.kind === "node"
        ? selection.concept
        : this.edge
          ? this.edge.obj
          : null;
    if (!concept) return;
    const got = await this.api.suggestRelationships(concept);
    const panel = document.createElement("div");
    panel.className = "suggestions";
    for (const [direction, items] of [
      ["incoming", got.incoming],
      ["outgoing", got.outgoing],
    ] as const) {
      const heading = document.createElement("h4");
      heading.textContent = direction;
      panel.appendChild(heading);
      const list = document.createElement("ul");
      for (const s of items) {
        const item = document.createElement("li");
        item.dataset.polarity = s.polarity;
        item.textContent = `${s.subj} → ${s.obj} (${s.support})`;
        const add = document.createElement("button");
        add.className = "accept-suggestion";
        add.textContent = "add";
        add.addEventListener("click", async () => {
          const { version } = await this.api.addEdge(
            this.state.modelId!,
            s.subj,
            s.obj,
            this.state.version,
          );
          this.state.version = version;
          const model = await this.api.getModel(this.state.modelId!);
          this.state.trackModel(model.id, model.version);
          this.callbacks.onModelChanged?.(model);
        });
        item.appendChild(add);
        list.appendChild(item);
      }
      panel.appendChild(list);
    }
    this.root.querySelector(".suggestions")?.remove();
    this.root.appendChild(panel);
  }
}
