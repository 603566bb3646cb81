/** Application bootstrap: wires the service client, store, three embedded
 * views, control panel, attribute filter, selection manager and detail view.
 *
 * The API base defaults to the page origin; override with ?api=http://host:port
 * when the explorer is served separately from the service.
 */

import { ApiClient, ApiError, SequencedRequests } from "./api.js";
import {
  detailCardVM,
  metricsPanelVM,
  renderAttributeFilter,
  renderDetailCard,
  renderMetricsPanel,
  renderSelectionList,
  showErrorBanner,
} from "./panels.js";
import { ScatterView } from "./scatter.js";
import { AppStore } from "./state.js";
import { Transform } from "./transform.js";
import type {
  EmbeddingPayload,
  GlyphScene,
  SelectionPayload,
  SpaceName,
} from "./types.js";
import { SPACES } from "./types.js";

const VIEW_WIDTH = 420;
const VIEW_HEIGHT = 360;

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return (fromQuery ?? window.location.origin).replace(/\/$/, "");
}

class ExplorerApp {
  readonly api = new ApiClient(apiBase());
  readonly store = new AppStore();
  private readonly sequenced = new SequencedRequests();
  private readonly views = new Map<SpaceName, ScatterView>();
  private readonly embeddings = new Map<SpaceName, EmbeddingPayload>();
  private readonly glyphScenes = new Map<SpaceName, GlyphScene>();

  constructor(private readonly root: Document) {
    this.store.subscribe(() => this.renderAll());
  }

  private el<T extends HTMLElement>(id: string): T {
    const found = this.root.getElementById(id);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
  }

  private fail(err: unknown): void {
    const message = err instanceof ApiError ? err.message : String(err);
    showErrorBanner(this.root.body, message);
  }

  async start(): Promise<void> {
    for (const space of SPACES) {
      const canvas = this.el<HTMLCanvasElement>(`view-${space}`);
      canvas.width = VIEW_WIDTH;
      canvas.height = VIEW_HEIGHT;
      this.views.set(space, new ScatterView(space, canvas, {
        onLasso: (polygon, s) => void this.lasso(polygon, s),
        onHover: (rid, s) => {
          if (rid === null || this.store.isKnownRecord(rid)) {
            this.store.setHover(s, rid);
          }
        },
        onTransform: (t, s) => this.store.setTransform(s, t),
        onOpenRecord: (rid) => void this.openDetail([rid]),
      }));
    }

    this.el<HTMLSelectElement>("display-mode").addEventListener("change", (e) => {
      const mode = (e.target as HTMLSelectElement).value === "flowers" ? "flowers" : "dots";
      this.store.setDisplayMode(mode);
      if (mode === "flowers") void this.loadGlyphs();
    });
    this.el<HTMLSelectElement>("flower-mode").addEventListener("change", async (e) => {
      this.store.flowerMode = (e.target as HTMLSelectElement).value as never;
      await this.pushSessionSettings();
      void this.loadGlyphs();
    });
    this.el<HTMLSelectElement>("distance-kind").addEventListener("change", async (e) => {
      this.store.distanceKind = (e.target as HTMLSelectElement).value as never;
      await this.pushSessionSettings();
      void this.loadGlyphs();
    });
    this.el<HTMLInputElement>("threshold").addEventListener("change", (e) => {
      this.store.threshold = Number((e.target as HTMLInputElement).value);
      void this.refreshMetrics();
    });

    try {
      const datasets = await this.api.listDatasets();
      const picker = this.el<HTMLSelectElement>("dataset-picker");
      picker.replaceChildren();
      for (const entry of datasets.payload) {
        const option = this.root.createElement("option");
        option.value = entry.id;
        option.textContent = `${entry.id} (${entry.n_records} records, K=${entry.k})`;
        picker.append(option);
      }
      picker.addEventListener("change", () => void this.openDataset(picker.value));
      if (datasets.payload.length > 0) {
        await this.openDataset(datasets.payload[0]!.id);
      }
    } catch (err) {
      this.fail(err);
    }
  }

  async openDataset(datasetId: string): Promise<void> {
    try {
      const summary = await this.api.datasetSummary(datasetId);
      const session = await this.api.createSession(datasetId);
      this.embeddings.clear();
      this.glyphScenes.clear();
      this.store.setDataset(summary.payload, session.payload.id);
      renderAttributeFilter(
        summary.payload,
        this.store.attributeFilter,
        this.el("attribute-filter"),
        (index, enabled) => void this.toggleAttribute(index, enabled),
      );
      await Promise.all(SPACES.map(async (space) => {
        const embedding = await this.api.waitForEmbedding(datasetId, space, {
          seed: 0,
        });
        this.embeddings.set(space, embedding.payload);
        this.store.setTransform(space, Transform.fit(
          embedding.payload.coords, VIEW_WIDTH, VIEW_HEIGHT));
      }));
    } catch (err) {
      this.fail(err);
    }
  }

  private async toggleAttribute(index: number, enabled: boolean): Promise<void> {
    const next = enabled
      ? [...this.store.attributeFilter, index]
      : this.store.attributeFilter.filter((i) => i !== index);
    if (next.length === 0) return;
    this.store.setAttributeFilter(next);
    try {
      await this.api.updateSession(this.store.sessionId!, {
        attribute_filter: this.store.attributeFilter,
      });
    } catch (err) {
      this.fail(err);
    }
    void this.loadGlyphs();
    void this.refreshMetrics();
  }

  private async pushSessionSettings(): Promise<void> {
    if (!this.store.sessionId) return;
    try {
      await this.api.updateSession(this.store.sessionId, {
        flower_mode: this.store.flowerMode,
        distance_kind: this.store.distanceKind,
      });
    } catch (err) {
      this.fail(err);
    }
  }

  private async loadGlyphs(): Promise<void> {
    const dataset = this.store.dataset;
    if (!dataset) return;
    for (const space of SPACES) {
      if (!this.embeddings.has(space)) continue;
      const scene = await this.sequenced.run(`glyphs:${space}`, () =>
        this.api.glyphScene(dataset.id, space, {
          mode: this.store.flowerMode,
          attributes: this.store.attributeFilter,
          distance: this.store.distanceKind,
        }),
      ).catch((err) => (this.fail(err), null));
      if (scene) {
        this.glyphScenes.set(space, scene.payload);
      }
    }
    this.renderAll();
  }

  private async lasso(polygon: [number, number][], space: SpaceName): Promise<void> {
    if (!this.store.sessionId) return;
    try {
      const selection = await this.api.lassoSelect(
        this.store.sessionId, polygon, space);
      this.store.addSelection(selection.payload);
      await this.refreshMetrics();
      await this.openDetail(selection.payload.record_ids.slice(0, 2));
    } catch (err) {
      this.fail(err);
    }
  }

  private async refreshMetrics(): Promise<void> {
    const host = this.el("selection-metrics");
    host.replaceChildren();
    if (!this.store.sessionId) return;
    for (const selection of this.store.selections) {
      try {
        const metrics = await this.api.selectionMetrics(
          this.store.sessionId,
          selection.id,
          this.store.attributeFilter,
          this.store.threshold,
        );
        const slot = this.root.createElement("div");
        host.append(slot);
        renderMetricsPanel(metricsPanelVM(selection, metrics), slot);
      } catch (err) {
        this.fail(err);
      }
    }
  }

  private async openDetail(recordIds: string[]): Promise<void> {
    const dataset = this.store.dataset;
    if (!dataset) return;
    const host = this.el("detail-view");
    host.replaceChildren();
    for (const rid of recordIds) {
      try {
        const detail = await this.api.recordDetail(dataset.id, rid);
        renderDetailCard(detailCardVM(detail), host, this.api.baseUrl);
      } catch (err) {
        this.fail(err);
      }
    }
  }

  private deleteSelection(selection: SelectionPayload): void {
    if (!this.store.sessionId) return;
    this.api.deleteSelection(this.store.sessionId, selection.id)
      .then(() => {
        this.store.removeSelection(selection.id);
        void this.refreshMetrics();
      })
      .catch((err) => this.fail(err));
  }

  private renderAll(): void {
    const dataset = this.store.dataset;
    if (!dataset) return;
    for (const space of SPACES) {
      const embedding = this.embeddings.get(space);
      const view = this.views.get(space);
      if (!embedding || !view) continue;
      view.render({
        space,
        recordIds: dataset.record_ids,
        coords: embedding.coords,
        glyphs: this.glyphScenes.get(space)?.glyphs ?? null,
        highlighted: this.store.highlightedIdsFor(space),
        highlightColors: this.store.highlightColors(),
        hoverId: this.store.views[space].hoverId,
        width: VIEW_WIDTH,
        height: VIEW_HEIGHT,
        flowerDensityLimit: this.store.flowerDensityLimit,
      }, this.store.views[space]);
    }
    renderSelectionList(
      this.store.selections,
      this.store.activeSelectionId,
      this.el("selection-list"),
      (id) => this.store.setActiveSelection(id),
      (id) => {
        const selection = this.store.selections.find((s) => s.id === id);
        if (selection) this.deleteSelection(selection);
      },
    );
  }
}

if (typeof document !== "undefined" && document.getElementById("view-act")) {
  const app = new ExplorerApp(document);
  void app.start();
}

export { ExplorerApp };
