/** The interactive clustering dialog.
 *
 * Seed selection and k come from the analyst; runs go through the job
 * queue; dragging a member to another cluster issues a reassign (which the
 * service pins), and "rerun" restarts k-means from the refined partition.
 * While a job is in flight the controls are disabled and a concurrent
 * mutation from elsewhere surfaces as `busy` (HTTP 409).
 */

import { ApiClient, ServiceError } from "./api.js";
import { clusterColor } from "./colors.js";
import type { ClusterModelDto, Pose } from "./types.js";

export interface ClusterView {
  modelId: string | null;
  model: ClusterModelDto | null;
  running: boolean;
  busy: boolean;               // server-side 409 on the last action
  memberColors: Record<string, string>;
  visibleCentroids: Set<number>;
  error: string | null;
}

export class ClusterPanel {
  readonly view: ClusterView = {
    modelId: null,
    model: null,
    running: false,
    busy: false,
    memberColors: {},
    visibleCentroids: new Set(),
    error: null,
  };

  onUpdate: (() => void) | null = null;

  constructor(private readonly api: ApiClient) {}

  get controlsEnabled(): boolean {
    return !this.view.running && !this.view.busy;
  }

  private apply(model: ClusterModelDto, modelId?: string): void {
    if (modelId) this.view.modelId = modelId;
    this.view.model = model;
    this.view.memberColors = {};
    for (const [id, cluster] of Object.entries(model.assignments)) {
      this.view.memberColors[id] = clusterColor(cluster);
    }
    if (this.view.visibleCentroids.size === 0) {
      this.view.visibleCentroids = new Set(Array.from({ length: model.k }, (_, c) => c));
    }
    this.onUpdate?.();
  }

  private async guarded<T>(action: () => Promise<T>): Promise<T | null> {
    this.view.running = true;
    this.view.error = null;
    this.onUpdate?.();
    try {
      const result = await action();
      this.view.busy = false;
      return result;
    } catch (error) {
      if (error instanceof ServiceError && error.status === 409) {
        this.view.busy = true;
      } else {
        this.view.error = error instanceof Error ? error.message : String(error);
      }
      return null;
    } finally {
      this.view.running = false;
      this.onUpdate?.();
    }
  }

  async initialize(scope: { referent: string } | { ids: string[] },
                   options: { seeds?: string[]; k?: number; rng_seed?: number }): Promise<void> {
    await this.guarded(async () => {
      const created = await this.api.initClusters(scope, options);
      this.view.visibleCentroids = new Set();
      this.apply(created.model, created.model_id);
    });
  }

  async run(): Promise<void> {
    const modelId = this.requireModel();
    await this.guarded(async () => {
      this.apply(await this.api.runClusters(modelId));
    });
  }

  /** Drag a member onto another cluster: reassign and pin. */
  async reassign(sequenceId: string, cluster: number): Promise<void> {
    const modelId = this.requireModel();
    await this.guarded(async () => {
      const updated = await this.api.reassign(modelId, sequenceId, cluster);
      this.apply(updated.model);
    });
  }

  /** Rerun k-means from the current (refined) assignments. */
  async rerunFromAssignments(): Promise<void> {
    const modelId = this.requireModel();
    await this.guarded(async () => {
      this.apply(await this.api.rerunClusters(modelId));
    });
  }

  toggleCentroid(cluster: number): void {
    if (this.view.visibleCentroids.has(cluster)) {
      this.view.visibleCentroids.delete(cluster);
    } else {
      this.view.visibleCentroids.add(cluster);
    }
    this.onUpdate?.();
  }

  /** Member ids whose centroid toggle is on (their paths get drawn). */
  visibleMembers(): string[] {
    const model = this.view.model;
    if (!model) return [];
    return Object.entries(model.assignments)
      .filter(([, cluster]) => this.view.visibleCentroids.has(cluster))
      .map(([id]) => id)
      .sort();
  }

  centroidFrameCount(cluster: number): number {
    const model = this.view.model;
    return model ? model.centroids[cluster].length : 0;
  }

  /** Centroids are averaged sequences; a frame unflattens to a 20-joint
   * pose, so the skeleton panel can animate them like any gesture. */
  centroidPose(cluster: number, frame: number): Pose {
    const model = this.view.model;
    if (!model) throw new Error("no cluster model loaded");
    const flat = model.centroids[cluster][frame];
    const pose: Pose = [];
    for (let j = 0; j < flat.length; j += 3) {
      pose.push([flat[j], flat[j + 1], flat[j + 2]]);
    }
    return pose;
  }

  private requireModel(): string {
    if (!this.view.modelId) throw new Error("no cluster model initialized");
    return this.view.modelId;
  }
}
