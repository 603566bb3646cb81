/** Central UI state: three view states, selections, linked highlighting.
 *
 * Highlight linking is an invariant by construction: there is exactly one
 * highlighted-id set in the store and every view reads it, so the set of
 * haloed records is identical in ACT, FEA and PRD at all times. Hover ids
 * are validated against the dataset before they are stored.
 */

import { Transform } from "./transform.js";
import type {
  DatasetSummary,
  DistanceKindName,
  FlowerModeName,
  SelectionPayload,
  SpaceName,
} from "./types.js";
import { SPACES } from "./types.js";

export type DisplayMode = "dots" | "flowers";

export interface ViewState {
  transform: Transform;
  displayMode: DisplayMode;
  hoverId: string | null;
}

export type StoreListener = (store: AppStore) => void;

export class AppStore {
  dataset: DatasetSummary | null = null;
  sessionId: string | null = null;
  readonly views: Record<SpaceName, ViewState>;
  selections: SelectionPayload[] = [];
  activeSelectionId: string | null = null;
  attributeFilter: number[] = [];
  flowerMode: FlowerModeName = "joint";
  distanceKind: DistanceKindName = "euclidean";
  threshold = 0.5;
  /** Flowers render only while at most this many records are visible. */
  flowerDensityLimit = 500;

  private readonly listeners = new Set<StoreListener>();

  constructor() {
    this.views = {
      act: AppStore.freshView(),
      fea: AppStore.freshView(),
      prd: AppStore.freshView(),
    };
  }

  private static freshView(): ViewState {
    return {
      transform: new Transform(1, 0, 0),
      displayMode: "dots",
      hoverId: null,
    };
  }

  subscribe(listener: StoreListener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this);
  }

  setDataset(dataset: DatasetSummary, sessionId: string): void {
    this.dataset = dataset;
    this.sessionId = sessionId;
    this.selections = [];
    this.activeSelectionId = null;
    this.attributeFilter = dataset.attributes.map((_, i) => i);
    for (const space of SPACES) {
      this.views[space] = AppStore.freshView();
    }
    this.emit();
  }

  setTransform(space: SpaceName, transform: Transform): void {
    this.views[space].transform = transform;
    this.emit();
  }

  setDisplayMode(mode: DisplayMode): void {
    for (const space of SPACES) this.views[space].displayMode = mode;
    this.emit();
  }

  setHover(space: SpaceName, recordId: string | null): void {
    if (recordId !== null && !this.isKnownRecord(recordId)) {
      throw new Error(`hover id ${recordId} is not in the dataset`);
    }
    this.views[space].hoverId = recordId;
    this.emit();
  }

  isKnownRecord(recordId: string): boolean {
    return this.dataset !== null && this.dataset.record_ids.includes(recordId);
  }

  addSelection(selection: SelectionPayload): void {
    this.selections = [...this.selections, selection];
    this.activeSelectionId = selection.id;
    this.emit();
  }

  removeSelection(selectionId: string): void {
    this.selections = this.selections.filter((s) => s.id !== selectionId);
    if (this.activeSelectionId === selectionId) this.activeSelectionId = null;
    this.emit();
  }

  setActiveSelection(selectionId: string | null): void {
    if (selectionId !== null && !this.selections.some((s) => s.id === selectionId)) {
      throw new Error(`unknown selection ${selectionId}`);
    }
    this.activeSelectionId = selectionId;
    this.emit();
  }

  setAttributeFilter(indices: number[]): void {
    if (indices.length === 0) {
      throw new Error("attribute filter must not be empty");
    }
    this.attributeFilter = [...indices].sort((a, b) => a - b);
    this.emit();
  }

  /** The single highlighted-id set all three views share. */
  highlightedIds(): ReadonlySet<string> {
    const ids = new Set<string>();
    for (const selection of this.selections) {
      for (const rid of selection.record_ids) ids.add(rid);
    }
    return ids;
  }

  /** Per-view accessor kept deliberately identical across spaces. */
  highlightedIdsFor(_space: SpaceName): ReadonlySet<string> {
    return this.highlightedIds();
  }

  /** record id -> halo color of the last selection containing it. */
  highlightColors(): Map<string, string> {
    const colors = new Map<string, string>();
    for (const selection of this.selections) {
      for (const rid of selection.record_ids) colors.set(rid, selection.color);
    }
    return colors;
  }
}
