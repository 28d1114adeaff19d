// Dependency-free SVG line charts.
//
// Series y-values are the API arrays, used verbatim: this module only maps
// numbers to pixel coordinates, it never derives new financial quantities.

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: boolean;
}

export interface ChartOptions {
  width?: number;
  height?: number;
  title?: string;
  logX?: boolean;
}

const MARGIN = { top: 28, right: 14, bottom: 30, left: 52 };

function extent(arrays: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const arr of arrays) {
    for (const v of arr) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!(hi > lo)) {
    hi = lo + 1;
    lo = lo - 1;
  }
  return [lo, hi];
}

function ticks(lo: number, hi: number, count: number): number[] {
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const out: number[] = [];
  for (let t = Math.ceil(lo / chosen) * chosen; t <= hi + 1e-12 * span; t += chosen) {
    out.push(t);
  }
  return out;
}

function fmt(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a < 1e-3 || a >= 1e5)) return v.toExponential(1);
  return String(Math.round(v * 1e6) / 1e6);
}

export function lineChart(series: Series[], options: ChartOptions = {}): string {
  const width = options.width ?? 560;
  const height = options.height ?? 300;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;
  const xraw = series.map((s) => s.x);
  const xmap = options.logX ? (v: number) => Math.log(v) : (v: number) => v;
  const [xlo, xhi] = extent(xraw.map((arr) => arr.map(xmap)));
  const [ylo, yhi] = extent(series.map((s) => s.y));
  const sx = (v: number) => MARGIN.left + ((xmap(v) - xlo) / (xhi - xlo)) * innerW;
  const sy = (v: number) => MARGIN.top + (1 - (v - ylo) / (yhi - ylo)) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="chart">`,
  );
  if (options.title) {
    parts.push(`<text x="${MARGIN.left}" y="16" class="chart-title">${options.title}</text>`);
  }
  for (const t of ticks(ylo, yhi, 5)) {
    const y = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(1)}" x2="${width - MARGIN.right}" y2="${y.toFixed(1)}" class="gridline"/>`,
      `<text x="${MARGIN.left - 6}" y="${(y + 3).toFixed(1)}" text-anchor="end" class="tick">${fmt(t)}</text>`,
    );
  }
  const xt = options.logX
    ? [0.25, 0.5, 1, 2, 4].filter((t) => xmap(t) >= xlo && xmap(t) <= xhi)
    : ticks(xlo, xhi, 6);
  for (const t of xt) {
    const x = sx(t);
    parts.push(
      `<line x1="${x.toFixed(1)}" y1="${MARGIN.top}" x2="${x.toFixed(1)}" y2="${height - MARGIN.bottom}" class="gridline"/>`,
      `<text x="${x.toFixed(1)}" y="${height - 10}" text-anchor="middle" class="tick">${fmt(t)}</text>`,
    );
  }
  let legendX = MARGIN.left + 8;
  for (const s of series) {
    const pts = s.x.map((xv, i) => `${sx(xv).toFixed(1)},${sy(s.y[i]).toFixed(1)}`).join(" ");
    const dash = s.dash ? ' stroke-dasharray="5,4"' : "";
    parts.push(
      `<polyline fill="none" stroke="${s.color}" stroke-width="1.6"${dash} points="${pts}"/>`,
    );
    parts.push(
      `<text x="${legendX}" y="${MARGIN.top + 12}" fill="${s.color}" class="legend">${s.label}</text>`,
    );
    legendX += 8 * s.label.length + 18;
  }
  parts.push("</svg>");
  return parts.join("");
}

// The chart data contracts: series wrap the response arrays by reference.

import type { DesignResponse } from "./types";

export function payoffSeries(response: DesignResponse): Series[] {
  return [
    { label: "f (growth-optimal)", x: response.x, y: response.f, color: "#888", dash: true },
    { label: "F (final)", x: response.x, y: response.F, color: "#0b5fff" },
  ];
}

export function densitySeries(response: DesignResponse): Series[] {
  return [
    { label: "m (market)", x: response.x, y: response.m, color: "#888", dash: true },
    { label: "b (believed)", x: response.x, y: response.b, color: "#d03500" },
  ];
}
