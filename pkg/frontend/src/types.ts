/** Wire types for the attrflower service JSON API.
 *
 * These mirror the server payloads field for field. The UI never derives
 * metrics, outcomes or petal states itself: everything displayed comes out
 * of these structures unchanged.
 */

export type SpaceName = "act" | "prd" | "fea";
export type FlowerModeName = "act" | "prd" | "joint";
export type DistanceKindName = "euclidean" | "cosine";
export type OutcomeName = "TP" | "TN" | "FP" | "FN";

export const SPACES: SpaceName[] = ["act", "fea", "prd"];

export interface DatasetListEntry {
  id: string;
  n_records: number;
  k: number;
  fea_dim: number;
}

export interface DatasetSummary extends DatasetListEntry {
  attributes: string[];
  colors: string[];
  record_ids: string[];
}

export interface EmbeddingPayload {
  space: SpaceName | null;
  coords: [number, number][];
  config: Record<string, unknown>;
  kl_trace: [number, number][];
}

export interface JobSubmitted {
  job_id: string;
  status: string;
  space: SpaceName;
}

export interface JobStatus {
  job_id: string;
  status: "running" | "done" | "error";
  space: SpaceName;
  result?: EmbeddingPayload;
  error?: string;
}

export interface PetalPayload {
  attribute_index: number;
  start_angle: number;
  end_angle: number;
  outer_radius: number;
  fill: string | null;
  border: string | null;
}

export interface CenterDotPayload {
  value: number;
  normalized: number;
  color: string;
}

export interface GlyphPayload {
  record_id: string;
  center: [number, number];
  radius: number;
  petals: PetalPayload[];
  dot: CenterDotPayload | null;
}

export interface GlyphScene {
  space: SpaceName;
  mode: FlowerModeName;
  distance: DistanceKindName;
  max_distance: number;
  attributes: number[];
  glyphs: GlyphPayload[];
}

export interface SelectionPayload {
  id: string;
  record_ids: string[];
  color: string;
  created_from: "lasso" | "rectangle" | "ids";
  source_space: SpaceName | null;
}

export interface ConfusionPayload {
  tp: number;
  tn: number;
  fp: number;
  fn: number;
  threshold: number;
}

export interface ReportPayload {
  accuracy: number | null;
  precision: number | null;
  recall: number | null;
  f1: number | null;
}

export interface SelectionMetricsPayload {
  selection_id: string;
  attributes: number[];
  confusion: ConfusionPayload;
  report: ReportPayload;
}

export interface AttributeOutcomePayload {
  index: number;
  name: string;
  color: string;
  act: number;
  prd: number;
  outcome: OutcomeName;
}

export interface RecordDetailPayload {
  id: string;
  image_url: string;
  has_image: boolean;
  act: number[];
  prd: number[];
  fea: number[];
  attributes: AttributeOutcomePayload[];
  distances: { euclidean: number; cosine: number };
}

export interface SessionPayload {
  id: string;
  dataset_id: string;
  attribute_filter: number[];
  flower_mode: FlowerModeName;
  distance_kind: DistanceKindName;
  selections: SelectionPayload[];
}
