/** Fixed bone topology for 20-joint skeletons and pose-to-segment helpers.
 *
 * Datasets carry joint names but no connectivity, so the viewer assumes a
 * Kinect-style tree: spine from the hip center, head on top, two arms off
 * the shoulder center, two legs off the hip.
 */

import type { Pose } from "./types.js";

export const BONES: [number, number][] = [
  [0, 1],               // hip center -> shoulder center (spine)
  [1, 2],               // -> head
  [1, 3], [3, 4], [4, 5], [5, 6],       // left arm chain
  [1, 7], [7, 8], [8, 9],               // right arm chain
  [0, 10], [10, 11], [11, 12], [12, 13], // left leg chain
  [0, 14], [14, 15], [15, 16],           // right leg chain
  [0, 17], [17, 18], [18, 19],           // auxiliary chain (sensor extras)
];

export interface Segment {
  from: [number, number];
  to: [number, number];
}

export interface SkeletonSprite {
  joints: [number, number][];
  segments: Segment[];
}

/** Orthographic front projection (x right, y up), scaled into a box. */
export function projectPose(pose: Pose, size: number): SkeletonSprite {
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const [x, y] of pose) {
    minX = Math.min(minX, x); maxX = Math.max(maxX, x);
    minY = Math.min(minY, y); maxY = Math.max(maxY, y);
  }
  const span = Math.max(maxX - minX, maxY - minY, 1e-9);
  const scale = size / span;
  const cx = (minX + maxX) / 2;
  const cy = (minY + maxY) / 2;

  const place = (j: number[]): [number, number] => [
    (j[0] - cx) * scale,
    -(j[1] - cy) * scale, // screen y grows downward
  ];

  const joints = pose.map(place);
  const segments = BONES.map(([a, b]) => ({ from: joints[a], to: joints[b] }));
  return { joints, segments };
}

export function isRenderable(sprite: SkeletonSprite): boolean {
  return sprite.segments.length === BONES.length &&
    sprite.joints.every(([x, y]) => Number.isFinite(x) && Number.isFinite(y));
}
