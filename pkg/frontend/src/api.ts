/** Typed client for the analysis service.
 *
 * The fetch implementation is injectable so tests can script the wire
 * without a browser or a network. All analysis math stays server-side;
 * this module only moves JSON.
 */

import type {
  ClusterModelDto,
  ConsensusReportDto,
  DensityGridDto,
  DistanceHistogramDto,
  GestureDto,
  GestureSummaryDto,
  JobDto,
  LandmarkGridDto,
  LatentPathDto,
  NeighborsDto,
  Pose,
  ScatterRecordDto,
} from "./types.js";

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ServiceError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }
}

export interface ApiClientOptions {
  baseUrl?: string;
  fetchImpl?: FetchLike;
  /** job poll interval in ms; tests shrink it */
  pollMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private readonly pollMs: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.fetchImpl = options.fetchImpl ?? (globalThis.fetch as unknown as FetchLike);
    this.pollMs = options.pollMs ?? 150;
    this.sleep = options.sleep ?? defaultSleep;
  }

  private async request<T>(path: string, init?: Parameters<FetchLike>[1]): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = (await response.json()) as T & { code?: string; message?: string };
    if (!response.ok) {
      throw new ServiceError(response.status, body.code ?? "error",
        body.message ?? `request failed: ${path}`);
    }
    return body;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  // -- corpus browsing --------------------------------------------------------

  referents(): Promise<{ referents: string[] }> {
    return this.request("/referents");
  }

  gestures(referent: string): Promise<{ referent: string; gestures: GestureSummaryDto[] }> {
    return this.request(`/referents/${encodeURIComponent(referent)}/gestures`);
  }

  gesture(id: string): Promise<GestureDto> {
    return this.request(`/gestures/${id}`);
  }

  neighbors(id: string, k: number): Promise<NeighborsDto> {
    return this.request(`/gestures/${id}/neighbors?k=${k}`);
  }

  // -- embedding and map ------------------------------------------------------

  decode(z: [number, number]): Promise<{ pose: Pose }> {
    return this.post("/embedding/decode", { z });
  }

  grid(viewport?: { x0: number; x1: number; y0: number; y1: number; m?: number }):
      Promise<LandmarkGridDto> {
    if (!viewport) return this.request("/map/grid");
    const m = viewport.m ?? 11;
    return this.request(
      `/map/grid?x0=${viewport.x0}&x1=${viewport.x1}&y0=${viewport.y0}&y1=${viewport.y1}&m=${m}`);
  }

  scatter(referent?: string): Promise<{ records: ScatterRecordDto[] }> {
    const query = referent ? `?referent=${encodeURIComponent(referent)}` : "";
    return this.request(`/map/scatter${query}`);
  }

  density(resolution: number, referent?: string): Promise<DensityGridDto> {
    const query = referent ? `&referent=${encodeURIComponent(referent)}` : "";
    return this.request(`/map/density?r=${resolution}${query}`);
  }

  paths(ids: string[]): Promise<{ paths: LatentPathDto[] }> {
    return this.request(`/map/paths?ids=${ids.map(encodeURIComponent).join(",")}`);
  }

  // -- analysis ----------------------------------------------------------------

  async runConsensus(referent: string): Promise<ConsensusReportDto> {
    const submitted = await this.post<{ job_id: string; cached: boolean }>(
      `/consensus/${encodeURIComponent(referent)}`, {});
    await this.waitForJob(submitted.job_id);
    return this.request(`/consensus/${encodeURIComponent(referent)}`);
  }

  distribution(referent: string): Promise<DistanceHistogramDto> {
    return this.request(`/consensus/${encodeURIComponent(referent)}/distribution`);
  }

  initClusters(scope: { referent: string } | { ids: string[] },
               options: { seeds?: string[]; k?: number; rng_seed?: number }):
      Promise<{ model_id: string; model: ClusterModelDto }> {
    return this.post("/clusters", { scope, ...options });
  }

  clusterModel(modelId: string): Promise<{ model_id: string; model: ClusterModelDto }> {
    return this.request(`/clusters/${modelId}`);
  }

  async runClusters(modelId: string): Promise<ClusterModelDto> {
    const submitted = await this.post<{ job_id: string }>(`/clusters/${modelId}/run`, {});
    await this.waitForJob(submitted.job_id);
    return (await this.clusterModel(modelId)).model;
  }

  reassign(modelId: string, sequenceId: string, cluster: number):
      Promise<{ model_id: string; model: ClusterModelDto }> {
    return this.post(`/clusters/${modelId}/reassign`,
      { sequence_id: sequenceId, cluster });
  }

  async rerunClusters(modelId: string): Promise<ClusterModelDto> {
    const submitted = await this.post<{ job_id: string }>(`/clusters/${modelId}/rerun`, {});
    await this.waitForJob(submitted.job_id);
    return (await this.clusterModel(modelId)).model;
  }

  job(id: string): Promise<JobDto> {
    return this.request(`/jobs/${id}`);
  }

  async waitForJob(id: string, timeoutMs = 600_000): Promise<JobDto> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.job(id);
      if (job.status === "done") return job;
      if (job.status === "failed") {
        throw new ServiceError(500, "job_failed", job.error ?? `job ${id} failed`);
      }
      if (Date.now() > deadline) {
        throw new ServiceError(504, "job_timeout", `job ${id} still ${job.status}`);
      }
      await this.sleep(this.pollMs);
    }
  }
}
