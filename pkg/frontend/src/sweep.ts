/** Sweep panel: pure plot-coordinate mapping plus canvas drawing. */

import type { SweepPayload } from "./types.js";

export interface PlotLayout {
  width: number;
  height: number;
  margin: { left: number; right: number; top: number; bottom: number };
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function layoutFor(sweep: SweepPayload, width: number, height: number): PlotLayout {
  const xs = sweep.distances_m;
  const areas = [
    ...sweep.indoor_area_m2,
    ...sweep.leakage_area_m2.filter((v): v is number => v !== null),
  ];
  const yMax = Math.max(1e-6, ...areas);
  return {
    width,
    height,
    margin: { left: 42, right: 10, top: 10, bottom: 26 },
    xMin: Math.min(...xs),
    xMax: Math.max(...xs),
    yMin: 0,
    yMax,
  };
}

export function toCanvasX(layout: PlotLayout, distance: number): number {
  const span = layout.xMax - layout.xMin || 1;
  const inner = layout.width - layout.margin.left - layout.margin.right;
  return layout.margin.left + ((distance - layout.xMin) / span) * inner;
}

export function toCanvasY(layout: PlotLayout, area: number): number {
  const span = layout.yMax - layout.yMin || 1;
  const inner = layout.height - layout.margin.top - layout.margin.bottom;
  return layout.height - layout.margin.bottom - ((area - layout.yMin) / span) * inner;
}

/** Sweep distance nearest to a clicked canvas x, exact over sample points. */
export function distanceAtCanvasX(layout: PlotLayout, sweep: SweepPayload, x: number): number {
  let best = sweep.distances_m[0];
  let bestErr = Infinity;
  for (const d of sweep.distances_m) {
    const err = Math.abs(toCanvasX(layout, d) - x);
    if (err < bestErr) {
      bestErr = err;
      best = d;
    }
  }
  return best;
}

export function drawSweep(
  ctx: CanvasRenderingContext2D,
  sweep: SweepPayload,
  currentDistance: number,
): PlotLayout {
  const { width, height } = ctx.canvas;
  const layout = layoutFor(sweep, width, height);
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#16161a";
  ctx.fillRect(0, 0, width, height);

  ctx.strokeStyle = "#555";
  ctx.strokeRect(
    layout.margin.left,
    layout.margin.top,
    width - layout.margin.left - layout.margin.right,
    height - layout.margin.top - layout.margin.bottom,
  );

  const drawSeries = (values: (number | null)[], color: string) => {
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let started = false;
    sweep.distances_m.forEach((d, i) => {
      const v = values[i];
      if (v === null) return;
      const x = toCanvasX(layout, d);
      const y = toCanvasY(layout, v);
      if (started) {
        ctx.lineTo(x, y);
      } else {
        ctx.moveTo(x, y);
        started = true;
      }
    });
    ctx.stroke();
    sweep.distances_m.forEach((d, i) => {
      const v = values[i];
      if (v === null) return;
      ctx.beginPath();
      ctx.arc(toCanvasX(layout, d), toCanvasY(layout, v), 3, 0, 2 * Math.PI);
      ctx.fill();
    });
  };
  drawSeries(sweep.indoor_area_m2, "#ffd60a");
  drawSeries(sweep.leakage_area_m2, "#e4572e");

  // current placement marker
  ctx.strokeStyle = "#9ef";
  ctx.setLineDash([4, 3]);
  const cx = toCanvasX(layout, currentDistance);
  ctx.beginPath();
  ctx.moveTo(cx, layout.margin.top);
  ctx.lineTo(cx, height - layout.margin.bottom);
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.fillStyle = "#bbb";
  ctx.font = "11px system-ui";
  ctx.fillText(`${layout.yMax.toFixed(1)} m²`, 2, layout.margin.top + 10);
  ctx.fillText("0", 2, height - layout.margin.bottom);
  ctx.fillText(`${layout.xMin} m`, layout.margin.left, height - 8);
  ctx.fillText(`${layout.xMax} m`, width - layout.margin.right - 28, height - 8);
  ctx.fillStyle = "#ffd60a";
  ctx.fillText("indoor", layout.margin.left + 8, layout.margin.top + 12);
  ctx.fillStyle = "#e4572e";
  ctx.fillText("beyond wall", layout.margin.left + 58, layout.margin.top + 12);
  return layout;
}
