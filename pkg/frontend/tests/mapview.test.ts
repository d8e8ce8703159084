import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient } from "../src/api.js";
import { MapView } from "../src/mapview.js";
import { BONES, isRenderable } from "../src/skeleton.js";
import { makeFakeService } from "./fake_service.js";

function makeView() {
  const fake = makeFakeService();
  const api = new ApiClient({ fetchImpl: fake.fetch, pollMs: 0 });
  // manual timer registry keeps the debounce logic in play without waiting
  const timers = new Map<number, () => void>();
  let nextHandle = 0;
  const view = new MapView(api, {
    hoverDebounceMs: 50,
    setTimer: (fn) => { timers.set(nextHandle, fn); return nextHandle++; },
    clearTimer: (handle) => { timers.delete(handle as number); },
  });
  const flushTimers = () => {
    for (const [handle, fn] of [...timers]) {
      timers.delete(handle);
      fn();
    }
  };
  return { fake, api, view, flushTimers };
}

test("hover decode renders a skeleton for any map coordinate", async () => {
  const { view, flushTimers } = makeView();
  const coordinates: [number, number][] = [
    [0, 0], [3.7, -2.2], [-4, 4], [120.5, -999.25],
  ];
  for (const point of coordinates) {
    const pending = view.hoverDecode(point);
    flushTimers();
    const result = await pending;
    assert.ok(result, "hover must resolve for the latest request");
    assert.equal(result.sprite.segments.length, BONES.length);
    assert.ok(isRenderable(result.sprite), `skeleton at ${point} must be drawable`);
  }
});

test("hover decode is debounced: superseded hovers never decode", async () => {
  const { fake, view, flushTimers } = makeView();
  const first = view.hoverDecode([0, 0]);
  const second = view.hoverDecode([1, 1]);
  flushTimers();
  assert.equal(await first, null);
  const winner = await second;
  assert.ok(winner && winner.point[0] === 1);
  const decodes = fake.calls.filter((c) => c.url.includes("/embedding/decode"));
  assert.equal(decodes.length, 1, "the cancelled hover must not reach the service");
});

test("hover callback feeds the skeleton panel", async () => {
  const { view, flushTimers } = makeView();
  let shown: [number, number] | null = null;
  view.onHover = (result) => { shown = result.point; };
  const pending = view.hoverDecode([2.5, -1]);
  flushTimers();
  await pending;
  assert.deepEqual(shown, [2.5, -1]);
});

test("stale grid responses for superseded viewports are discarded", async () => {
  const { view } = makeView();
  const early = view.refreshGrid({ x0: -4, x1: 4, y0: -4, y1: 4, m: 11 });
  const late = view.refreshGrid({ x0: 0, x1: 1, y0: 0, y1: 1, m: 3 });
  await Promise.all([early, late]);
  assert.equal(view.data.viewport?.x0, 0, "the newest viewport wins");
  assert.equal(view.data.landmarks.length, 9);
});

test("zooming refetches a grid confined to the sub-region", async () => {
  const { view } = makeView();
  await view.refreshGrid({ x0: -4, x1: 4, y0: -4, y1: 4, m: 11 });
  assert.equal(view.data.landmarks.length, 121);
  await view.refreshGrid({ x0: -1, x1: 0.5, y0: 0, y1: 2, m: 11 });
  assert.equal(view.data.landmarks.length, 121);
  for (const landmark of view.data.landmarks) {
    assert.ok(landmark.point[0] >= -1 && landmark.point[0] <= 0.5);
    assert.ok(landmark.point[1] >= 0 && landmark.point[1] <= 2);
  }
});

test("overlay modes are single-valued: scatter xor density xor none", async () => {
  const { view } = makeView();
  await view.setOverlay("scatter");
  assert.ok(view.data.scatter.length > 0);
  assert.equal(view.data.density, null);
  await view.setOverlay("density");
  assert.equal(view.data.scatter.length, 0);
  assert.ok(view.data.density);
  await view.setOverlay("none");
  assert.equal(view.data.scatter.length, 0);
  assert.equal(view.data.density, null);
});
