/**
 * Import dialog: pick other models to merge into the current one, then walk
 * the server's merge report as a curation checklist (ambiguous polarities to
 * review, near-duplicate pairs to accept or reject).
 */

import { CagApi, MergeReportPayload, ModelPayload } from "./api.js";
import { CanvasState } from "./state.js";

export interface ImportFlowCallbacks {
  onModelChanged?: (model: ModelPayload) => void;
}

export class ImportFlow {
  private root: HTMLElement | null = null;

  constructor(
    private api: CagApi,
    private state: CanvasState,
    private callbacks: ImportFlowCallbacks = {},
  ) {}

  mount(root: HTMLElement): void {
    this.root = root;
  }

  async open(): Promise<void> {
    if (!this.root || !this.state.modelId) return;
    const { models } = await this.api.listModels();
    const others = models.filter((m) => m.id !== this.state.modelId);
    const root = this.root;
    root.textContent = "";

    const dialog = document.createElement("div");
    dialog.className = "import-dialog";
    const title = document.createElement("h3");
    title.textContent = "Import models";
    dialog.appendChild(title);

    const list = document.createElement("ul");
    list.className = "model-list";
    for (const m of others) {
      const item = document.createElement("li");
      const pick = document.createElement("input");
      pick.type = "checkbox";
      pick.value = m.id;
      const label = document.createElement("label");
      label.textContent = `${m.name} (${m.nodes} nodes, ${m.edges} edges)`;
      item.append(pick, label);
      list.appendChild(item);
    }
    dialog.appendChild(list);

    const go = document.createElement("button");
    go.className = "do-import";
    go.textContent = "Import";
    go.addEventListener("click", async () => {
      const chosen = [...list.querySelectorAll<HTMLInputElement>("input:checked")].map(
        (input) => input.value,
      );
      if (!chosen.length) return;
      const { version, report } = await this.api.importModels(
        this.state.modelId!,
        chosen,
        this.state.version,
      );
      this.state.version = version;
      const model = await this.api.getModel(this.state.modelId!);
      this.state.trackModel(model.id, model.version);
      this.callbacks.onModelChanged?.(model);
      this.renderChecklist(report);
    });
    dialog.appendChild(go);
    root.appendChild(dialog);
  }

  renderChecklist(report: MergeReportPayload): void {
    const root = this.root!;
    root.textContent = "";
    const checklist = document.createElement("div");
    checklist.className = "merge-checklist";

    const ambiguous = document.createElement("section");
    ambiguous.className = "ambiguous-edges";
    const ambiguousTitle = document.createElement("h4");
    ambiguousTitle.textContent = `Ambiguous polarities (${report.ambiguous_edges.length})`;
    ambiguous.appendChild(ambiguousTitle);
    const ambiguousList = document.createElement("ul");
    for (const [subj, obj] of report.ambiguous_edges) {
      const item = document.createElement("li");
      item.dataset.subj = subj;
      item.dataset.obj = obj;
      item.textContent = `${subj} → ${obj} needs polarity review`;
      ambiguousList.appendChild(item);
    }
    ambiguous.appendChild(ambiguousList);
    checklist.appendChild(ambiguous);

    const duplicates = document.createElement("section");
    duplicates.className = "duplicate-pairs";
    const duplicatesTitle = document.createElement("h4");
    duplicatesTitle.textContent = `Near-duplicate nodes (${report.node_matches.length})`;
    duplicates.appendChild(duplicatesTitle);
    const duplicatesList = document.createElement("ul");
    for (const match of report.node_matches) {
      const item = document.createElement("li");
      item.dataset.a = match.a;
      item.dataset.b = match.b;
      const label = document.createElement("span");
      label.textContent = `${match.a} ≈ ${match.b} (${match.score.toFixed(2)})`;
      item.appendChild(label);
      const accept = document.createElement("button");
      accept.className = "accept-merge";
      accept.textContent = "merge";
      accept.addEventListener("click", async () => {
        const { version } = await this.api.mergeNodes(
          this.state.modelId!,
          match.a,
          match.b,
          this.state.version,
        );
        this.state.version = version;
        item.remove();
        const model = await this.api.getModel(this.state.modelId!);
        this.state.trackModel(model.id, model.version);
        this.callbacks.onModelChanged?.(model);
      });
      const reject = document.createElement("button");
      reject.className = "reject-merge";
      reject.textContent = "keep both";
      reject.addEventListener("click", () => item.remove());
      item.append(accept, reject);
      duplicatesList.appendChild(item);
    }
    duplicates.appendChild(duplicatesList);
    checklist.appendChild(duplicates);

    if (report.skipped_edges.length) {
      const skipped = document.createElement("section");
      skipped.className = "skipped-edges";
      const skippedTitle = document.createElement("h4");
      skippedTitle.textContent = `Skipped (would create cycles): ${report.skipped_edges.length}`;
      skipped.appendChild(skippedTitle);
      checklist.appendChild(skipped);
    }
    root.appendChild(checklist);
  }
}
