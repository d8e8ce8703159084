/** Canvas drawing for the map and skeleton panels.
 *
 * Pure functions over a 2D context: every coordinate comes straight from
 * service responses through the world-to-screen transform; no analysis
 * happens here.
 */

import { colorFor, clusterColor } from "./colors.js";
import type { MapData } from "./mapview.js";
import type { SkeletonSprite } from "./skeleton.js";
import type { Viewport } from "./state.js";

export interface Transform {
  toScreen(point: [number, number]): [number, number];
}

export function makeTransform(viewport: Viewport, width: number, height: number): Transform {
  const sx = width / (viewport.x1 - viewport.x0);
  const sy = height / (viewport.y1 - viewport.y0);
  return {
    toScreen: ([x, y]) => [
      (x - viewport.x0) * sx,
      height - (y - viewport.y0) * sy, // world y up, screen y down
    ],
  };
}

export function screenToWorld(viewport: Viewport, width: number, height: number,
                              px: number, py: number): [number, number] {
  return [
    viewport.x0 + (px / width) * (viewport.x1 - viewport.x0),
    viewport.y0 + ((height - py) / height) * (viewport.y1 - viewport.y0),
  ];
}

function drawSprite(ctx: CanvasRenderingContext2D, sprite: SkeletonSprite,
                    cx: number, cy: number, color: string, lineWidth = 1): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = lineWidth;
  ctx.beginPath();
  for (const { from, to } of sprite.segments) {
    ctx.moveTo(cx + from[0], cy + from[1]);
    ctx.lineTo(cx + to[0], cy + to[1]);
  }
  ctx.stroke();
}

export function drawMap(ctx: CanvasRenderingContext2D, data: MapData,
                        width: number, height: number,
                        memberColors: Record<string, string> = {},
                        marker: [number, number] | null = null): void {
  ctx.clearRect(0, 0, width, height);
  if (!data.viewport) return;
  const transform = makeTransform(data.viewport, width, height);

  if (data.density) {
    const { values, r } = data.density;
    const cellW = width / r;
    const cellH = height / r;
    let max = 0;
    for (const row of values) for (const v of row) max = Math.max(max, v);
    for (let i = 0; i < r; i++) {
      for (let j = 0; j < r; j++) {
        const intensity = max > 0 ? values[i][j] / max : 0;
        if (intensity <= 0) continue;
        ctx.fillStyle = `rgba(70, 110, 180, ${0.75 * intensity})`;
        // row i is y-ascending; flip for the screen
        ctx.fillRect(j * cellW, height - (i + 1) * cellH, cellW, cellH);
      }
    }
  }

  ctx.globalAlpha = 0.35;
  for (const landmark of data.landmarks) {
    const [px, py] = transform.toScreen(landmark.point);
    drawSprite(ctx, landmark.sprite, px, py, "#555");
  }
  ctx.globalAlpha = 1.0;

  for (const record of data.scatter) {
    const [px, py] = transform.toScreen(record.point);
    ctx.fillStyle = colorFor(record.referent);
    ctx.beginPath();
    ctx.arc(px, py, 2.5, 0, Math.PI * 2);
    ctx.fill();
  }

  for (const path of data.selectedPaths) {
    ctx.strokeStyle = memberColors[path.id] ?? colorFor(path.id);
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    path.points.forEach((p, t) => {
      const [px, py] = transform.toScreen([p[0], p[1]]);
      if (t === 0) ctx.moveTo(px, py); else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  if (marker) {
    const [px, py] = transform.toScreen(marker);
    ctx.fillStyle = "#d62728";
    ctx.beginPath();
    ctx.arc(px, py, 5, 0, Math.PI * 2);
    ctx.fill();
  }
}

export function drawSkeletonPanel(ctx: CanvasRenderingContext2D, sprite: SkeletonSprite | null,
                                  width: number, height: number, label = ""): void {
  ctx.clearRect(0, 0, width, height);
  if (sprite) {
    drawSprite(ctx, sprite, width / 2, height / 2, "#222", 2);
    ctx.fillStyle = "#222";
    for (const [x, y] of sprite.joints) {
      ctx.beginPath();
      ctx.arc(width / 2 + x, height / 2 + y, 2, 0, Math.PI * 2);
      ctx.fill();
    }
  }
  if (label) {
    ctx.fillStyle = "#444";
    ctx.font = "12px sans-serif";
    ctx.fillText(label, 8, height - 10);
  }
}

export function clusterLegend(k: number): { cluster: number; color: string }[] {
  return Array.from({ length: k }, (_, c) => ({ cluster: c, color: clusterColor(c) }));
}
