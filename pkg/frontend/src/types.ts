/** Wire types for the analysis service. Field names mirror the JSON exactly. */

export type Pose = number[][]; // 20 joints x [x, y, z]

export interface ViewportDto {
  x_min: number;
  x_max: number;
  y_min: number;
  y_max: number;
  grid_m: number;
}

export interface LandmarkGridDto {
  viewport: ViewportDto;
  m: number;
  points: number[][][]; // (m, m, 2)
  poses: Pose[][];      // (m, m) decoded skeletons
}

export interface ScatterRecordDto {
  point: [number, number];
  sequence_id: string;
  frame_index: number;
  dataset: string;
  participant: string;
  referent: string;
  trial: number;
}

export interface DensityGridDto {
  viewport: ViewportDto;
  r: number;
  bandwidth: [number, number];
  bandwidth_fallback: boolean;
  values: number[][]; // (r, r), row-major, y ascending
}

export interface LatentPathDto {
  id: string;
  referent: string;
  participant: string;
  trial: number;
  points: number[][]; // (T, 2)
  frames: number[];
}

export interface GestureSummaryDto {
  id: string;
  participant: string;
  trial: number;
  length: number;
  dropped_frames: number;
}

export interface GestureDto {
  id: string;
  dataset: string;
  participant: string;
  referent: string;
  trial: number;
  dropped_frames: number;
  frames: Pose[];
}

export interface JobDto {
  id: string;
  kind: string;
  status: "queued" | "running" | "done" | "failed";
  progress: number;
  result_ref: string | null;
  error: string | null;
}

export interface ClusterModelDto {
  k: number;
  scope: string[];
  centroids: number[][][];
  assignments: Record<string, number>;
  pinned: string[];
  inertia: number;
  inertia_trace: number[];
  status: string;
  reseeds: unknown[];
}

export interface ConsensusReportDto {
  referent: string;
  variance: number;
  distances: { id: string; distance: number }[];
  barycenter: {
    frames: number[][];
    member_ids: string[];
    member_distances: number[];
    wgss_trace: number[];
    iterations_run: number;
    converged: boolean;
  };
}

export interface DistanceHistogramDto {
  distances: number[];
  bin_width: number;
  counts: number[];
  bin_edges: number[];
}

export interface NeighborsDto {
  neighbors: { id: string; distance: number }[];
  truncated: boolean;
}

export interface ApiError {
  code: string;
  message: string;
}
