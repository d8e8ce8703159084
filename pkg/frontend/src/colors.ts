/** Stable categorical colors: same key, same color, across refetches. */

const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

const assigned = new Map<string, string>();

export function colorFor(key: string): string {
  let color = assigned.get(key);
  if (!color) {
    color = PALETTE[assigned.size % PALETTE.length];
    assigned.set(key, color);
  }
  return color;
}

export function clusterColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

export function resetColors(): void {
  assigned.clear();
}
