/** Browser bootstrap: wires the controllers to the DOM.
 *
 * Expects the element ids from index.html and a running analysis service
 * (same origin, or ?service=http://host:port).
 */

import { ApiClient } from "./api.js";
import { LinkedAnimation } from "./animation.js";
import { ClusterPanel } from "./clusterPanel.js";
import { MapView } from "./mapview.js";
import { drawMap, drawSkeletonPanel, screenToWorld } from "./render.js";
import * as skeletonModule from "./skeleton.js";
import {
  initialState,
  panViewport,
  selectSequences,
  setOverlay,
  ViewState,
  zoomViewport,
  OverlayMode,
} from "./state.js";
import { StatsPanel } from "./statsPanel.js";

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

export async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient({ baseUrl: params.get("service") ?? "" });

  let state: ViewState = initialState();
  const mapCanvas = element<HTMLCanvasElement>("map");
  const skeletonCanvas = element<HTMLCanvasElement>("skeleton");
  const mapCtx = mapCanvas.getContext("2d")!;
  const skeletonCtx = skeletonCanvas.getContext("2d")!;

  const mapView = new MapView(api);
  const animation = new LinkedAnimation(api);
  const clusters = new ClusterPanel(api);
  const stats = new StatsPanel(api);

  const redraw = () => {
    const frame = animation.view(state.clock);
    drawMap(mapCtx, mapView.data, mapCanvas.width, mapCanvas.height,
            clusters.view.memberColors, frame ? frame.marker : null);
    if (frame) {
      drawSkeletonPanel(skeletonCtx, frame.skeleton, skeletonCanvas.width,
                        skeletonCanvas.height,
                        `${frame.sequenceId} frame ${frame.frameIndex}`);
      element<HTMLInputElement>("frame-slider").value = String(frame.frameIndex);
    }
    renderStats();
    renderClusters();
  };
  mapView.onUpdate = redraw;
  clusters.onUpdate = redraw;
  stats.onUpdate = redraw;

  mapView.onHover = (result) => {
    // hovering previews the decoded pose without touching the animation
    drawSkeletonPanel(skeletonCtx, result.sprite, skeletonCanvas.width,
                      skeletonCanvas.height,
                      `decoded (${result.point[0].toFixed(2)}, ${result.point[1].toFixed(2)})`);
  };

  mapCanvas.addEventListener("mousemove", (event) => {
    const world = screenToWorld(state.viewport, mapCanvas.width, mapCanvas.height,
                                event.offsetX, event.offsetY);
    void mapView.hoverDecode(world).catch(toast);
  });
  mapCanvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    const world = screenToWorld(state.viewport, mapCanvas.width, mapCanvas.height,
                                event.offsetX, event.offsetY);
    state = zoomViewport(state, event.deltaY > 0 ? 1.25 : 0.8, world);
    void mapView.refreshGrid(state.viewport).catch(toast);
  });
  let dragging: [number, number] | null = null;
  mapCanvas.addEventListener("mousedown", (e) => { dragging = [e.offsetX, e.offsetY]; });
  window.addEventListener("mouseup", () => { dragging = null; });
  mapCanvas.addEventListener("mousemove", (event) => {
    if (!dragging) return;
    const scale = (state.viewport.x1 - state.viewport.x0) / mapCanvas.width;
    state = panViewport(state, -(event.offsetX - dragging[0]) * scale,
                        (event.offsetY - dragging[1]) * scale);
    dragging = [event.offsetX, event.offsetY];
    void mapView.refreshGrid(state.viewport).catch(toast);
  });

  for (const mode of ["none", "scatter", "density"] as OverlayMode[]) {
    element<HTMLButtonElement>(`overlay-${mode}`).addEventListener("click", () => {
      state = setOverlay(state, mode);
      void mapView.setOverlay(mode).catch(toast);
    });
  }

  element<HTMLButtonElement>("play").addEventListener("click", () => {
    state = state.clock.playing ? animation.pause(state) : animation.play(state);
  });
  element<HTMLInputElement>("frame-slider").addEventListener("input", (event) => {
    state = animation.seek(state, Number((event.target as HTMLInputElement).value));
    redraw();
  });
  window.setInterval(() => {
    const next = animation.advance(state);
    if (next !== state) {
      state = next;
      redraw();
    }
  }, 100);

  // experiment browser: referent list with per-gesture selection
  const { referents } = await api.referents();
  const list = element<HTMLUListElement>("referent-list");
  for (const referent of referents) {
    const item = document.createElement("li");
    const link = document.createElement("a");
    link.textContent = referent;
    link.href = "#";
    link.addEventListener("click", async (event) => {
      event.preventDefault();
      const { gestures } = await api.gestures(referent);
      const ids = gestures.map((g) => g.id);
      state = selectSequences(state, ids);
      await mapView.showPaths(ids);
      if (ids.length) {
        state = await animation.load(state, ids[0]);
        void stats.showNeighbors(ids[0]).catch(toast);
      }
      void stats.showReferent(referent).catch(toast);
      redraw();
    });
    item.appendChild(link);
    list.appendChild(item);
  }

  function renderStats(): void {
    const target = element<HTMLDivElement>("stats");
    const v = stats.view;
    const lines: string[] = [];
    if (v.loading) lines.push("computing consensus...");
    if (v.referent && v.variance !== null) {
      lines.push(`<b>${v.referent}</b>: variance around average ${v.variance.toFixed(3)}`);
      if (v.histogram) {
        lines.push(`distances: [${v.histogram.counts.join(", ")}] ` +
                   `(bin width ${v.histogram.bin_width.toFixed(3)})`);
      }
    }
    if (v.neighborsFor && v.neighbors) {
      const names = v.neighbors.neighbors
        .map((n) => `${n.id.split("/").slice(1).join("/")} (${n.distance.toFixed(2)})`);
      lines.push(`nearest to ${v.neighborsFor}: ${names.join(", ")}`);
    }
    target.innerHTML = lines.join("<br>");
  }

  function renderClusters(): void {
    const target = element<HTMLDivElement>("cluster-info");
    const v = clusters.view;
    if (!v.model) {
      target.textContent = "no clustering yet";
      return;
    }
    const rows = Array.from({ length: v.model.k }, (_, c) => {
      const members = Object.entries(v.model!.assignments)
        .filter(([, cl]) => cl === c).length;
      return `cluster ${c}: ${members} members`;
    });
    rows.push(`status: ${v.model.status}${v.busy ? " (busy)" : ""}`);
    target.textContent = rows.join(" | ");
  }

  element<HTMLButtonElement>("cluster-run").addEventListener("click", async () => {
    const referent = element<HTMLSelectElement>("cluster-referent").value;
    const k = Number(element<HTMLInputElement>("cluster-k").value) || 2;
    await clusters.initialize({ referent }, { k, rng_seed: 0 });
    await clusters.run();
    await mapView.showPaths(clusters.visibleMembers());
  });
  element<HTMLButtonElement>("cluster-rerun").addEventListener("click", async () => {
    await clusters.rerunFromAssignments();
    await mapView.showPaths(clusters.visibleMembers());
  });

  // centroid playback: the averaged sequence steps through the skeleton panel
  let centroidClock: { cluster: number; frame: number } | null = null;
  element<HTMLButtonElement>("centroid-animate").addEventListener("click", () => {
    if (!clusters.view.model) return;
    const cluster = Number(element<HTMLInputElement>("centroid-index").value) || 0;
    centroidClock = cluster < clusters.view.model.k ? { cluster, frame: 0 } : null;
  });
  window.setInterval(() => {
    if (!centroidClock || !clusters.view.model) return;
    const { cluster } = centroidClock;
    const total = clusters.centroidFrameCount(cluster);
    if (total === 0) return;
    centroidClock.frame = (centroidClock.frame + 1) % total;
    const pose = clusters.centroidPose(cluster, centroidClock.frame);
    const { projectPose } = skeletonModule;
    drawSkeletonPanel(skeletonCtx, projectPose(pose, 160), skeletonCanvas.width,
                      skeletonCanvas.height,
                      `centroid ${cluster} frame ${centroidClock.frame}`);
  }, 120);

  const referentSelect = element<HTMLSelectElement>("cluster-referent");
  for (const referent of referents) {
    const option = document.createElement("option");
    option.value = option.textContent = referent;
    referentSelect.appendChild(option);
  }

  function toast(error: unknown): void {
    const target = element<HTMLDivElement>("toast");
    target.textContent = error instanceof Error ? error.message : String(error);
    target.style.opacity = "1";
    setTimeout(() => { target.style.opacity = "0"; }, 4000);
  }

  await mapView.refreshGrid(state.viewport);
}

if (typeof document !== "undefined" && document.getElementById("map")) {
  void boot();
}
