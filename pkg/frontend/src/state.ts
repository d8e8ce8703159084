/** View state shared by the map, skeleton, and clustering panels.
 *
 * Plain data plus pure update helpers: the rendering layer reacts to the
 * state, never the other way around.
 */

export type OverlayMode = "none" | "scatter" | "density";

export interface Viewport {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
  m: number;
}

export interface AnimationClock {
  sequenceId: string | null;
  frame: number;
  totalFrames: number;
  playing: boolean;
}

export interface ViewState {
  viewport: Viewport;
  overlay: OverlayMode;
  selectedIds: string[];
  clock: AnimationClock;
  activeClusterModel: string | null;
}

export const initialState = (): ViewState => ({
  viewport: { x0: -4, x1: 4, y0: -4, y1: 4, m: 11 },
  overlay: "none",
  selectedIds: [],
  clock: { sequenceId: null, frame: 0, totalFrames: 0, playing: false },
  activeClusterModel: null,
});

export function setViewport(state: ViewState, viewport: Viewport): ViewState {
  if (!(viewport.x0 < viewport.x1 && viewport.y0 < viewport.y1)) {
    throw new Error("viewport must have positive extent");
  }
  return { ...state, viewport: { ...viewport, m: Math.max(2, Math.round(viewport.m)) } };
}

export function zoomViewport(state: ViewState, factor: number,
                             center?: [number, number]): ViewState {
  const { x0, x1, y0, y1, m } = state.viewport;
  const cx = center ? center[0] : (x0 + x1) / 2;
  const cy = center ? center[1] : (y0 + y1) / 2;
  const hw = ((x1 - x0) / 2) * factor;
  const hh = ((y1 - y0) / 2) * factor;
  return setViewport(state, { x0: cx - hw, x1: cx + hw, y0: cy - hh, y1: cy + hh, m });
}

export function panViewport(state: ViewState, dx: number, dy: number): ViewState {
  const { x0, x1, y0, y1, m } = state.viewport;
  return setViewport(state, { x0: x0 + dx, x1: x1 + dx, y0: y0 + dy, y1: y1 + dy, m });
}

export function setOverlay(state: ViewState, overlay: OverlayMode): ViewState {
  return { ...state, overlay };
}

export function selectSequences(state: ViewState, ids: string[]): ViewState {
  return { ...state, selectedIds: [...new Set(ids)] };
}

/** Switching the animated sequence resets the clock to frame 0. */
export function setAnimatedSequence(state: ViewState, sequenceId: string,
                                    totalFrames: number): ViewState {
  return {
    ...state,
    clock: { sequenceId, frame: 0, totalFrames, playing: false },
  };
}

export function clampFrame(frame: number, totalFrames: number): number {
  if (totalFrames <= 0) return 0;
  return Math.min(Math.max(Math.round(frame), 0), totalFrames - 1);
}

export function seekFrame(state: ViewState, frame: number): ViewState {
  return {
    ...state,
    clock: { ...state.clock, frame: clampFrame(frame, state.clock.totalFrames) },
  };
}

export function setPlaying(state: ViewState, playing: boolean): ViewState {
  return { ...state, clock: { ...state.clock, playing } };
}

/** One animation tick: advance and wrap while playing. */
export function tick(state: ViewState): ViewState {
  const { clock } = state;
  if (!clock.playing || clock.totalFrames <= 0) return state;
  const next = clock.frame + 1 >= clock.totalFrames ? 0 : clock.frame + 1;
  return { ...state, clock: { ...clock, frame: next } };
}
