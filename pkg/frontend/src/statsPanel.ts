/** Statistics view: consensus variance per referent, the distribution of
 * member distances to the average gesture, and nearest neighbors for a
 * selected gesture.
 */

import { ApiClient } from "./api.js";
import type { DistanceHistogramDto, NeighborsDto } from "./types.js";

export interface StatsView {
  referent: string | null;
  variance: number | null;
  memberDistances: { id: string; distance: number }[];
  histogram: DistanceHistogramDto | null;
  neighborsFor: string | null;
  neighbors: NeighborsDto | null;
  loading: boolean;
}

export class StatsPanel {
  readonly view: StatsView = {
    referent: null,
    variance: null,
    memberDistances: [],
    histogram: null,
    neighborsFor: null,
    neighbors: null,
    loading: false,
  };

  onUpdate: (() => void) | null = null;

  constructor(private readonly api: ApiClient) {}

  async showReferent(referent: string): Promise<void> {
    this.view.loading = true;
    this.onUpdate?.();
    try {
      const report = await this.api.runConsensus(referent);
      this.view.referent = referent;
      this.view.variance = report.variance;
      this.view.memberDistances = report.distances;
      this.view.histogram = await this.api.distribution(referent);
    } finally {
      this.view.loading = false;
      this.onUpdate?.();
    }
  }

  async showNeighbors(sequenceId: string, k = 5): Promise<void> {
    this.view.neighborsFor = sequenceId;
    this.view.neighbors = await this.api.neighbors(sequenceId, k);
    this.onUpdate?.();
  }
}
