/**
 * Stacked per-filter timing bar. One segment per filter the server
 * actually ran (the trailer lists only those), widths proportional to
 * microseconds against the frame budget; whatever headroom remains is
 * left blank. Over budget, the segments fill the bar pro rata.
 */

import type { TimingReport } from "./protocol";

export interface BarSegment {
  name: string;
  us: number;
  x: number;
  w: number;
  color: string;
}

const PALETTE = [
  "#4e79a7", "#f28e2b", "#59a045", "#b07aa1",
  "#76b7b2", "#e15759", "#edc948", "#9c755f",
];

const colorCache = new Map<string, string>();

export function filterColor(name: string): string {
  let c = colorCache.get(name);
  if (!c) {
    let h = 0;
    for (let i = 0; i < name.length; i++) h = (h * 31 + name.charCodeAt(i)) >>> 0;
    c = PALETTE[h % PALETTE.length];
    colorCache.set(name, c);
  }
  return c;
}

export function layoutTimingBar(timing: TimingReport, widthPx: number): BarSegment[] {
  const denom = Math.max(timing.budget_us, timing.total_us, 1);
  const segments: BarSegment[] = [];
  let x = 0;
  for (const f of timing.filters) {
    const w = (f.us / denom) * widthPx;
    segments.push({ name: f.name, us: f.us, x, w, color: filterColor(f.name) });
    x += w;
  }
  return segments;
}

export function drawTimingBar(
  ctx: CanvasRenderingContext2D,
  timing: TimingReport,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = timing.over_budget ? "#5a1f1f" : "#20262e";
  ctx.fillRect(0, 0, width, height);
  for (const seg of layoutTimingBar(timing, width)) {
    ctx.fillStyle = seg.color;
    ctx.fillRect(seg.x, 0, Math.max(seg.w, 1), height);
  }
  // Budget tick (only meaningful when over budget stretches the scale).
  const denom = Math.max(timing.budget_us, timing.total_us, 1);
  const tick = (timing.budget_us / denom) * width;
  ctx.fillStyle = "#ffffff88";
  ctx.fillRect(tick - 1, 0, 2, height);
}
