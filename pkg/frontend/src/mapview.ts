/** Map view controller: landmark grid, overlays, hover decoding.
 *
 * Every viewport change refetches the landmark grid; responses that arrive
 * for a viewport the user has already left are discarded. Hovering decodes
 * the cursor position into a skeleton (debounced, default 50 ms) so the
 * linked skeleton panel can show poses for *any* map location, including
 * regions without recorded data.
 */

import { ApiClient } from "./api.js";
import { projectPose, SkeletonSprite } from "./skeleton.js";
import type { Viewport } from "./state.js";
import type {
  DensityGridDto,
  LandmarkGridDto,
  LatentPathDto,
  ScatterRecordDto,
} from "./types.js";

export interface LandmarkSprite {
  point: [number, number];
  sprite: SkeletonSprite;
}

export interface MapData {
  viewport: Viewport | null;
  landmarks: LandmarkSprite[];
  scatter: ScatterRecordDto[];
  density: DensityGridDto | null;
  selectedPaths: LatentPathDto[];
}

export interface HoverResult {
  point: [number, number];
  sprite: SkeletonSprite;
}

export interface MapViewOptions {
  /** hover decode debounce in ms */
  hoverDebounceMs?: number;
  landmarkSize?: number;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
}

export class MapView {
  readonly data: MapData = {
    viewport: null,
    landmarks: [],
    scatter: [],
    density: null,
    selectedPaths: [],
  };

  onUpdate: (() => void) | null = null;
  onHover: ((result: HoverResult) => void) | null = null;

  private gridEpoch = 0;
  private hoverEpoch = 0;
  private hoverTimer: unknown = null;
  private pendingHover: ((result: HoverResult | null) => void) | null = null;
  private readonly debounceMs: number;
  private readonly landmarkSize: number;
  private readonly setTimer: (fn: () => void, ms: number) => unknown;
  private readonly clearTimer: (handle: unknown) => void;

  constructor(private readonly api: ApiClient, options: MapViewOptions = {}) {
    this.debounceMs = options.hoverDebounceMs ?? 50;
    this.landmarkSize = options.landmarkSize ?? 48;
    this.setTimer = options.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimer = options.clearTimer ?? ((h) => clearTimeout(h as number));
  }

  /** Refetch the landmark grid for a viewport; stale responses are dropped. */
  async refreshGrid(viewport: Viewport): Promise<void> {
    const epoch = ++this.gridEpoch;
    const grid = await this.api.grid(viewport);
    if (epoch !== this.gridEpoch) return; // superseded while in flight
    this.data.viewport = viewport;
    this.data.landmarks = this.spritesFrom(grid);
    this.onUpdate?.();
  }

  private spritesFrom(grid: LandmarkGridDto): LandmarkSprite[] {
    const landmarks: LandmarkSprite[] = [];
    for (let i = 0; i < grid.m; i++) {
      for (let j = 0; j < grid.m; j++) {
        landmarks.push({
          point: [grid.points[i][j][0], grid.points[i][j][1]],
          sprite: projectPose(grid.poses[i][j], this.landmarkSize),
        });
      }
    }
    return landmarks;
  }

  async setOverlay(mode: "none" | "scatter" | "density", referent?: string): Promise<void> {
    if (mode === "scatter") {
      this.data.scatter = (await this.api.scatter(referent)).records;
      this.data.density = null;
    } else if (mode === "density") {
      this.data.density = await this.api.density(64, referent);
      this.data.scatter = [];
    } else {
      this.data.scatter = [];
      this.data.density = null;
    }
    this.onUpdate?.();
  }

  async showPaths(ids: string[]): Promise<void> {
    this.data.selectedPaths = ids.length ? (await this.api.paths(ids)).paths : [];
    this.onUpdate?.();
  }

  /**
   * Debounced hover decode: resolves with the skeleton for the hovered map
   * coordinate, or null when a newer hover superseded this one (superseded
   * requests settle immediately and never reach the service).
   */
  hoverDecode(point: [number, number]): Promise<HoverResult | null> {
    const epoch = ++this.hoverEpoch;
    if (this.hoverTimer !== null) this.clearTimer(this.hoverTimer);
    this.pendingHover?.(null);
    return new Promise((resolve, reject) => {
      this.pendingHover = resolve;
      this.hoverTimer = this.setTimer(async () => {
        try {
          const { pose } = await this.api.decode(point);
          if (epoch !== this.hoverEpoch) {
            resolve(null); // a newer hover won while decoding
            return;
          }
          const result = { point, sprite: projectPose(pose, this.landmarkSize * 3) };
          this.pendingHover = null;
          this.onHover?.(result);
          resolve(result);
        } catch (error) {
          this.pendingHover = null;
          reject(error);
        }
      }, this.debounceMs);
    });
  }
}
