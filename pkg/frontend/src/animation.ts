/** Linked animation of a gesture: 3D skeleton frames and the map path
 * marker advance on one shared clock, so at tick t the skeleton shows
 * frame t and the map marker sits on path point t.
 */

import { ApiClient } from "./api.js";
import { projectPose, SkeletonSprite } from "./skeleton.js";
import {
  AnimationClock,
  clampFrame,
  setAnimatedSequence,
  seekFrame,
  setPlaying,
  tick,
  ViewState,
} from "./state.js";
import type { LatentPathDto, Pose } from "./types.js";

export interface AnimationFrameView {
  sequenceId: string;
  frameIndex: number;        // the shared clock value
  skeleton: SkeletonSprite;  // skeleton panel content at this clock
  marker: [number, number];  // map marker position at this clock
  playing: boolean;
  totalFrames: number;
}

export class LinkedAnimation {
  private frames: Pose[] = [];
  private path: LatentPathDto | null = null;

  constructor(private readonly api: ApiClient, private readonly size = 160) {}

  /** Load a sequence and reset the clock to its first frame. */
  async load(state: ViewState, sequenceId: string): Promise<ViewState> {
    const [gesture, paths] = await Promise.all([
      this.api.gesture(sequenceId),
      this.api.paths([sequenceId]),
    ]);
    this.frames = gesture.frames;
    this.path = paths.paths[0];
    return setAnimatedSequence(state, sequenceId, this.frames.length);
  }

  view(clock: AnimationClock): AnimationFrameView | null {
    if (!this.path || clock.sequenceId === null || this.frames.length === 0) return null;
    const frame = clampFrame(clock.frame, this.frames.length);
    const point = this.path.points[frame];
    return {
      sequenceId: clock.sequenceId,
      frameIndex: frame,
      skeleton: projectPose(this.frames[frame], this.size),
      marker: [point[0], point[1]],
      playing: clock.playing,
      totalFrames: this.frames.length,
    };
  }

  play(state: ViewState): ViewState {
    return setPlaying(state, true);
  }

  pause(state: ViewState): ViewState {
    return setPlaying(state, false);
  }

  /** Slider drag: jump both views to an absolute frame (clamped). */
  seek(state: ViewState, frame: number): ViewState {
    return seekFrame(state, frame);
  }

  advance(state: ViewState): ViewState {
    return tick(state);
  }
}
