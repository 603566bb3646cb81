/** Typed client for the attrflower service.
 *
 * Every call returns the parsed payload together with the raw response
 * text, so views can prove that what they display is exactly what the
 * service sent. Stale responses from superseded requests are discarded
 * per logical slot via SequencedRequests.
 */

import type {
  DatasetListEntry,
  DatasetSummary,
  DistanceKindName,
  EmbeddingPayload,
  FlowerModeName,
  GlyphScene,
  JobStatus,
  JobSubmitted,
  RecordDetailPayload,
  SelectionMetricsPayload,
  SelectionPayload,
  SessionPayload,
  SpaceName,
} from "./types.js";

export interface Fetched<T> {
  payload: T;
  /** Exact response body text as served. */
  raw: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly url: string,
    detail: string,
  ) {
    super(`${status} ${url}: ${detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<Fetched<T>> {
    const url = `${this.baseUrl}${path}`;
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let response: Response;
    try {
      response = await this.fetchFn(url, init);
    } catch (err) {
      throw new ApiError(0, url, String(err));
    }
    const raw = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, url, raw);
    }
    return { payload: raw === "" ? (undefined as T) : (JSON.parse(raw) as T), raw };
  }

  listDatasets(): Promise<Fetched<DatasetListEntry[]>> {
    return this.request("GET", "/datasets");
  }

  datasetSummary(datasetId: string): Promise<Fetched<DatasetSummary>> {
    return this.request("GET", `/datasets/${datasetId}`);
  }

  uploadDatasetByPath(path: string): Promise<Fetched<DatasetListEntry>> {
    return this.request("POST", "/datasets", { path });
  }

  submitEmbedding(
    datasetId: string,
    space: SpaceName,
    config: Record<string, unknown> = {},
  ): Promise<Fetched<JobSubmitted>> {
    return this.request("POST", `/datasets/${datasetId}/embeddings`, {
      space,
      config,
    });
  }

  pollEmbedding(datasetId: string, jobId: string): Promise<Fetched<JobStatus>> {
    return this.request("GET", `/datasets/${datasetId}/embeddings/${jobId}`);
  }

  latestEmbedding(
    datasetId: string,
    space: SpaceName,
  ): Promise<Fetched<EmbeddingPayload>> {
    return this.request("GET", `/datasets/${datasetId}/embeddings?space=${space}`);
  }

  /** Submit and poll until the job finishes; rejects on job error. */
  async waitForEmbedding(
    datasetId: string,
    space: SpaceName,
    config: Record<string, unknown> = {},
    pollMs = 150,
  ): Promise<Fetched<EmbeddingPayload>> {
    const submitted = await this.submitEmbedding(datasetId, space, config);
    for (;;) {
      const poll = await this.pollEmbedding(datasetId, submitted.payload.job_id);
      if (poll.payload.status === "error") {
        throw new ApiError(500, `${this.baseUrl}/datasets/${datasetId}/embeddings`,
          poll.payload.error ?? "embedding job failed");
      }
      if (poll.payload.status === "done") {
        return { payload: poll.payload.result!, raw: poll.raw };
      }
      await sleep(pollMs);
    }
  }

  createSession(datasetId: string): Promise<Fetched<SessionPayload>> {
    return this.request("POST", "/sessions", { dataset_id: datasetId });
  }

  updateSession(
    sessionId: string,
    patch: {
      attribute_filter?: number[];
      flower_mode?: FlowerModeName;
      distance_kind?: DistanceKindName;
    },
  ): Promise<Fetched<SessionPayload>> {
    return this.request("PATCH", `/sessions/${sessionId}`, patch);
  }

  lassoSelect(
    sessionId: string,
    polygon: [number, number][],
    space: SpaceName,
  ): Promise<Fetched<SelectionPayload>> {
    return this.request("POST", `/sessions/${sessionId}/selections`, {
      polygon,
      space,
    });
  }

  idsSelect(
    sessionId: string,
    recordIds: string[],
  ): Promise<Fetched<SelectionPayload>> {
    return this.request("POST", `/sessions/${sessionId}/selections`, {
      record_ids: recordIds,
    });
  }

  deleteSelection(sessionId: string, selectionId: string): Promise<Fetched<void>> {
    return this.request("DELETE", `/sessions/${sessionId}/selections/${selectionId}`);
  }

  selectionMetrics(
    sessionId: string,
    selectionId: string,
    attributes?: number[],
    threshold?: number,
  ): Promise<Fetched<SelectionMetricsPayload>> {
    const params = new URLSearchParams();
    if (attributes !== undefined) params.set("attributes", attributes.join(","));
    if (threshold !== undefined) params.set("threshold", String(threshold));
    const query = params.toString();
    return this.request(
      "GET",
      `/sessions/${sessionId}/selections/${selectionId}/metrics${query ? `?${query}` : ""}`,
    );
  }

  recordDetail(
    datasetId: string,
    recordId: string,
  ): Promise<Fetched<RecordDetailPayload>> {
    return this.request("GET", `/datasets/${datasetId}/records/${recordId}`);
  }

  glyphScene(
    datasetId: string,
    space: SpaceName,
    options: {
      mode?: FlowerModeName;
      attributes?: number[];
      distance?: DistanceKindName;
      radius?: number;
    } = {},
  ): Promise<Fetched<GlyphScene>> {
    const params = new URLSearchParams({ space });
    if (options.mode) params.set("mode", options.mode);
    if (options.attributes) params.set("attributes", options.attributes.join(","));
    if (options.distance) params.set("distance", options.distance);
    if (options.radius !== undefined) params.set("radius", String(options.radius));
    return this.request("GET", `/datasets/${datasetId}/glyphs?${params}`);
  }
}

/** Latest-wins gate for asynchronous view updates.
 *
 * Each logical slot (for example "glyphs:fea") tracks a sequence number;
 * a task's result is surfaced only if no newer task was started for the
 * same slot, so slow responses can never overwrite fresh state.
 */
export class SequencedRequests {
  private readonly sequence = new Map<string, number>();

  async run<T>(slot: string, task: () => Promise<T>): Promise<T | null> {
    const ticket = (this.sequence.get(slot) ?? 0) + 1;
    this.sequence.set(slot, ticket);
    const result = await task();
    return this.sequence.get(slot) === ticket ? result : null;
  }
}
