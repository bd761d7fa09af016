/** Bootstrap: wire the canvas, evidence panel, explorer, and import flow. */

import { CagApi } from "./api.js";
import { CanvasState } from "./state.js";
import { CagCanvas } from "./render.js";
import { EvidencePanel } from "./evidence.js";
import { KnowledgeExplorer } from "./explorer.js";
import { ImportFlow } from "./importflow.js";

export function bootstrap(document: Document, apiBase = ""): {
  canvas: CagCanvas;
  panel: EvidencePanel;
  explorer: KnowledgeExplorer;
  importFlow: ImportFlow;
  state: CanvasState;
} {
  const api = new CagApi(apiBase);
  const state = new CanvasState();

  const panel = new EvidencePanel(api, state);
  const canvas = new CagCanvas(api, state, {
    onSelectEdge: (edge) => void panel.showEdge(edge),
    onSelectNode: () => void panel.showSuggestions(),
  });
  const explorer = new KnowledgeExplorer(api, state, {
    onModelChanged: (model) => canvas.render(model),
  });
  const importFlow = new ImportFlow(api, state, {
    onModelChanged: (model) => canvas.render(model),
  });

  canvas.mount(document.querySelector("#canvas") as HTMLElement);
  panel.mount(document.querySelector("#side-panel") as HTMLElement);
  explorer.mount(document.querySelector("#explorer") as HTMLElement);
  importFlow.mount(document.querySelector("#import") as HTMLElement);

  return { canvas, panel, explorer, importFlow, state };
}

declare global {
  interface Window {
    cagkit?: ReturnType<typeof bootstrap>;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.querySelector("#canvas")) {
  window.cagkit = bootstrap(document);
}
