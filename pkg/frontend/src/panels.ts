/** Panel view models and DOM renderers.
 *
 * View models copy service payload values verbatim (no arithmetic, no
 * reformatting of the numbers themselves) and keep the raw response text
 * they came from, so contract tests can assert that what the DOM shows is
 * exactly what the service said.
 */

import type { Fetched } from "./api.js";
import type {
  AttributeOutcomePayload,
  DatasetSummary,
  RecordDetailPayload,
  SelectionMetricsPayload,
  SelectionPayload,
} from "./types.js";

const UNDEFINED_METRIC = "—";

export function formatMetric(value: number | null): string {
  return value === null ? UNDEFINED_METRIC : String(value);
}

// ---------------------------------------------------------------------------
// Selection manager / group metrics
// ---------------------------------------------------------------------------

export interface MetricsPanelVM {
  selectionId: string;
  color: string;
  nRecords: number;
  counts: { tp: number; tn: number; fp: number; fn: number };
  metrics: {
    accuracy: string;
    precision: string;
    recall: string;
    f1: string;
  };
  /** Exact response text the numbers were read from. */
  raw: string;
}

export function metricsPanelVM(
  selection: SelectionPayload,
  response: Fetched<SelectionMetricsPayload>,
): MetricsPanelVM {
  const { confusion, report } = response.payload;
  return {
    selectionId: selection.id,
    color: selection.color,
    nRecords: selection.record_ids.length,
    counts: { tp: confusion.tp, tn: confusion.tn, fp: confusion.fp, fn: confusion.fn },
    metrics: {
      accuracy: formatMetric(report.accuracy),
      precision: formatMetric(report.precision),
      recall: formatMetric(report.recall),
      f1: formatMetric(report.f1),
    },
    raw: response.raw,
  };
}

export function renderMetricsPanel(vm: MetricsPanelVM, host: HTMLElement): void {
  host.replaceChildren();
  const card = host.ownerDocument.createElement("div");
  card.className = "selection-card";
  card.dataset["selectionId"] = vm.selectionId;

  const title = host.ownerDocument.createElement("div");
  title.className = "selection-title";
  const swatch = host.ownerDocument.createElement("span");
  swatch.className = "swatch";
  swatch.style.backgroundColor = vm.color;
  title.append(swatch, `${vm.selectionId} · ${vm.nRecords} records`);
  card.append(title);

  const counts = host.ownerDocument.createElement("div");
  counts.className = "counts";
  for (const key of ["tp", "tn", "fp", "fn"] as const) {
    const cell = host.ownerDocument.createElement("span");
    cell.className = `count count-${key}`;
    cell.textContent = `${key.toUpperCase()} ${vm.counts[key]}`;
    counts.append(cell);
  }
  card.append(counts);

  const table = host.ownerDocument.createElement("dl");
  table.className = "metrics";
  for (const [label, value] of Object.entries(vm.metrics)) {
    const dt = host.ownerDocument.createElement("dt");
    dt.textContent = label;
    const dd = host.ownerDocument.createElement("dd");
    dd.dataset["metric"] = label;
    dd.textContent = value;
    table.append(dt, dd);
  }
  card.append(table);
  host.append(card);
}

// ---------------------------------------------------------------------------
// Detail view
// ---------------------------------------------------------------------------

export interface DetailChipVM {
  index: number;
  name: string;
  color: string;
  act: number;
  prd: number;
  outcome: AttributeOutcomePayload["outcome"];
}

export interface DetailCardVM {
  recordId: string;
  imageUrl: string;
  hasImage: boolean;
  chips: DetailChipVM[];
  distances: { euclidean: number; cosine: number };
  raw: string;
}

export function detailCardVM(response: Fetched<RecordDetailPayload>): DetailCardVM {
  const payload = response.payload;
  return {
    recordId: payload.id,
    imageUrl: payload.image_url,
    hasImage: payload.has_image,
    chips: payload.attributes.map((a) => ({
      index: a.index,
      name: a.name,
      color: a.color,
      act: a.act,
      prd: a.prd,
      outcome: a.outcome,
    })),
    distances: payload.distances,
    raw: response.raw,
  };
}

export function renderDetailCard(
  vm: DetailCardVM,
  host: HTMLElement,
  apiBase = "",
): HTMLElement {
  const doc = host.ownerDocument;
  const card = doc.createElement("div");
  card.className = "detail-card";
  card.dataset["recordId"] = vm.recordId;

  const title = doc.createElement("div");
  title.className = "detail-title";
  title.textContent = vm.recordId;
  card.append(title);

  const img = doc.createElement("img");
  img.className = "thumb";
  img.src = `${apiBase}${vm.imageUrl}`;
  img.alt = vm.hasImage ? vm.recordId : `${vm.recordId} (placeholder)`;
  card.append(img);

  const chips = doc.createElement("div");
  chips.className = "chips";
  for (const chip of vm.chips) {
    const el = doc.createElement("span");
    el.className = `chip outcome-${chip.outcome.toLowerCase()}`;
    el.dataset["attributeIndex"] = String(chip.index);
    el.dataset["outcome"] = chip.outcome;
    el.style.borderColor = chip.color;
    el.textContent = `${chip.name} ${chip.outcome}`;
    el.title = `act=${chip.act} prd=${chip.prd}`;
    chips.append(el);
  }
  card.append(chips);

  const distances = doc.createElement("div");
  distances.className = "distances";
  distances.textContent =
    `euclidean ${vm.distances.euclidean} · cosine ${vm.distances.cosine}`;
  card.append(distances);

  host.append(card);
  return card;
}

// ---------------------------------------------------------------------------
// Attribute filter and selection list
// ---------------------------------------------------------------------------

export function renderAttributeFilter(
  dataset: DatasetSummary,
  active: number[],
  host: HTMLElement,
  onToggle: (index: number, enabled: boolean) => void,
): void {
  host.replaceChildren();
  const doc = host.ownerDocument;
  dataset.attributes.forEach((name, index) => {
    const label = doc.createElement("label");
    label.className = "attr-toggle";
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.checked = active.includes(index);
    box.addEventListener("change", () => onToggle(index, box.checked));
    const swatch = doc.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = dataset.colors[index] ?? "#888888";
    label.append(box, swatch, name);
    host.append(label);
  });
}

export function renderSelectionList(
  selections: SelectionPayload[],
  activeId: string | null,
  host: HTMLElement,
  onActivate: (id: string) => void,
  onDelete: (id: string) => void,
): void {
  host.replaceChildren();
  const doc = host.ownerDocument;
  for (const selection of selections) {
    const row = doc.createElement("div");
    row.className = "selection-row" + (selection.id === activeId ? " active" : "");
    row.dataset["selectionId"] = selection.id;
    const swatch = doc.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = selection.color;
    const label = doc.createElement("span");
    label.textContent =
      `${selection.id} (${selection.record_ids.length}) ` +
      `${selection.created_from}${selection.source_space ? `@${selection.source_space}` : ""}`;
    label.addEventListener("click", () => onActivate(selection.id));
    const remove = doc.createElement("button");
    remove.textContent = "×";
    remove.addEventListener("click", () => onDelete(selection.id));
    row.append(swatch, label, remove);
    host.append(row);
  }
}

// ---------------------------------------------------------------------------
// Error banner
// ---------------------------------------------------------------------------

export function showErrorBanner(host: HTMLElement, message: string): void {
  let banner = host.querySelector<HTMLElement>(".error-banner");
  if (!banner) {
    banner = host.ownerDocument.createElement("div");
    banner.className = "error-banner";
    const dismiss = host.ownerDocument.createElement("button");
    dismiss.textContent = "dismiss";
    dismiss.addEventListener("click", () => banner!.remove());
    banner.append(host.ownerDocument.createElement("span"), dismiss);
    host.prepend(banner);
  }
  banner.querySelector("span")!.textContent = message;
}
