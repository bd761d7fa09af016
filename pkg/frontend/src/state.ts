/** Canvas/editor session state shared by the views. */

export type Selection =
  | { kind: "none" }
  | { kind: "node"; concept: string }
  | { kind: "edge"; subj: string; obj: string };

export interface PendingDrag {
  fromConcept: string;
  x: number;
  y: number;
}

export const MIN_ZOOM = 0.1;
export const MAX_ZOOM = 4.0;

export class CanvasState {
  modelId: string | null = null;
  version = 0;
  selection: Selection = { kind: "none" };
  pendingDrag: PendingDrag | null = null;
  panX = 0;
  panY = 0;
  private zoomFactor = 1.0;

  get zoom(): number {
    return this.zoomFactor;
  }

  setZoom(value: number): void {
    this.zoomFactor = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, value));
  }

  select(selection: Selection): void {
    this.selection = selection;
  }

  clearSelection(): void {
    this.selection = { kind: "none" };
  }

  trackModel(modelId: string, version: number): void {
    if (this.modelId !== modelId) {
      this.clearSelection();
      this.pendingDrag = null;
    }
    this.modelId = modelId;
    this.version = version;
  }
}
