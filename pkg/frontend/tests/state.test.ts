import assert from "node:assert/strict";
import { test } from "node:test";

import {
  initialState,
  panViewport,
  selectSequences,
  setOverlay,
  setViewport,
  zoomViewport,
} from "../src/state.js";
import { makeTransform, screenToWorld } from "../src/render.js";

test("viewport updates validate extent", () => {
  const state = initialState();
  assert.throws(() => setViewport(state, { x0: 1, x1: 1, y0: 0, y1: 1, m: 11 }));
  const updated = setViewport(state, { x0: -2, x1: 2, y0: -1, y1: 1, m: 11 });
  assert.equal(updated.viewport.x0, -2);
});

test("zoom about a point keeps that point inside the viewport", () => {
  let state = initialState();
  state = zoomViewport(state, 0.5, [2, 2]);
  const { x0, x1, y0, y1 } = state.viewport;
  assert.ok(x0 < 2 && 2 < x1 && y0 < 2 && 2 < y1);
  assert.ok(x1 - x0 < 8);
});

test("pan shifts both axes", () => {
  let state = initialState();
  state = panViewport(state, 1.5, -0.5);
  assert.equal(state.viewport.x0, -2.5);
  assert.equal(state.viewport.y1, 3.5);
});

test("viewport round trip: screen -> world -> screen", () => {
  const state = setViewport(initialState(), { x0: -3, x1: 5, y0: -2, y1: 6, m: 11 });
  const transform = makeTransform(state.viewport, 800, 600);
  for (const [px, py] of [[0, 0], [400, 300], [799, 599], [123, 456]]) {
    const world = screenToWorld(state.viewport, 800, 600, px, py);
    const [qx, qy] = transform.toScreen(world);
    assert.ok(Math.abs(qx - px) < 1e-9);
    assert.ok(Math.abs(qy - py) < 1e-9);
  }
});

test("overlay mode is single-valued", () => {
  let state = initialState();
  state = setOverlay(state, "scatter");
  state = setOverlay(state, "density");
  assert.equal(state.overlay, "density");
});

test("sequence selection deduplicates", () => {
  const state = selectSequences(initialState(), ["a", "b", "a"]);
  assert.deepEqual(state.selectedIds, ["a", "b"]);
});
