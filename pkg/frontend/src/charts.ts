/**
 * Dependency-free SVG line/step charts.
 *
 * buildChart computes a pure view model (scaled paths, ticks, annotation
 * positions) from series segments; renderChart writes it into an <svg>.
 * Event annotations are mapped through the same x scale as the data, so a
 * step edge and its annotation line land on the same pixel.
 */

import type { Point } from "./series.js";

export interface ChartSeries {
  label: string;
  color: string;
  step?: boolean;
  segments: Point[][];
}

export interface Annotation {
  x: number;
  label: string;
}

export interface ChartOptions {
  yMin?: number;
  yMax?: number;
  xLabel?: string;
  yLabel?: string;
}

export interface ChartModel {
  viewW: number;
  viewH: number;
  plot: { x0: number; y0: number; x1: number; y1: number };
  paths: { d: string; color: string; label: string }[];
  xTicks: { px: number; label: string }[];
  yTicks: { py: number; label: string }[];
  annotations: { px: number; label: string }[];
  xLabel: string;
  yLabel: string;
  empty: boolean;
}

export function linScale(d0: number, d1: number, r0: number, r1: number): (v: number) => number {
  if (d0 === d1) return () => (r0 + r1) / 2;
  const k = (r1 - r0) / (d1 - d0);
  return (v: number) => r0 + (v - d0) * k;
}

/** Tick positions at a nice step (1/2/5 x 10^k) covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (mag * m >= rawStep) {
      step = mag * m;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Number(v.toFixed(12)));
  }
  return out;
}

export function pathFor(points: Point[], sx: (v: number) => number, sy: (v: number) => number, step: boolean): string {
  if (points.length === 0) return "";
  const parts: string[] = [`M${sx(points[0].x)},${sy(points[0].y)}`];
  for (let i = 1; i < points.length; i += 1) {
    const p = points[i];
    if (step) {
      const prev = points[i - 1];
      parts.push(`L${sx(p.x)},${sy(prev.y)}`);
    }
    parts.push(`L${sx(p.x)},${sy(p.y)}`);
  }
  return parts.join(" ");
}

function dataExtent(series: ChartSeries[]): { x0: number; x1: number; y0: number; y1: number } | null {
  let found = false;
  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const s of series) {
    for (const seg of s.segments) {
      for (const p of seg) {
        found = true;
        x0 = Math.min(x0, p.x);
        x1 = Math.max(x1, p.x);
        y0 = Math.min(y0, p.y);
        y1 = Math.max(y1, p.y);
      }
    }
  }
  return found ? { x0, x1, y0, y1 } : null;
}

export function buildChart(
  series: ChartSeries[],
  annotations: Annotation[],
  viewW: number,
  viewH: number,
  opts: ChartOptions = {},
): ChartModel {
  const plot = { x0: 46, y0: 12, x1: viewW - 10, y1: viewH - 30 };
  const ext = dataExtent(series);
  const model: ChartModel = {
    viewW,
    viewH,
    plot,
    paths: [],
    xTicks: [],
    yTicks: [],
    annotations: [],
    xLabel: opts.xLabel ?? "",
    yLabel: opts.yLabel ?? "",
    empty: ext === null,
  };
  if (ext === null) return model; // fresh run: axes only

  let { x0, x1 } = ext;
  let y0 = opts.yMin ?? ext.y0;
  let y1 = opts.yMax ?? ext.y1;
  if (x0 === x1) x1 = x0 + 1;
  if (y0 === y1) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const pad = (y1 - y0) * 0.08;
  if (opts.yMin === undefined) y0 -= pad;
  if (opts.yMax === undefined) y1 += pad;

  const sx = linScale(x0, x1, plot.x0, plot.x1);
  const sy = linScale(y0, y1, plot.y1, plot.y0);

  for (const s of series) {
    for (const seg of s.segments) {
      if (seg.length === 0) continue;
      model.paths.push({ d: pathFor(seg, sx, sy, s.step ?? false), color: s.color, label: s.label });
    }
  }
  model.xTicks = niceTicks(x0, x1, 6).map((v) => ({ px: sx(v), label: formatTick(v) }));
  model.yTicks = niceTicks(y0, y1, 4).map((v) => ({ py: sy(v), label: formatTick(v) }));
  model.annotations = annotations
    .filter((a) => a.x >= x0 && a.x <= x1)
    .map((a) => ({ px: sx(a.x), label: a.label }));
  return model;
}

function formatTick(v: number): string {
  if (Number.isInteger(v)) return String(v);
  return String(Number(v.toPrecision(6)));
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl(tag: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

export function renderChart(svg: SVGSVGElement, model: ChartModel): void {
  svg.setAttribute("viewBox", `0 0 ${model.viewW} ${model.viewH}`);
  svg.replaceChildren();
  const { plot } = model;
  svg.appendChild(
    svgEl("rect", {
      x: plot.x0,
      y: plot.y0,
      width: plot.x1 - plot.x0,
      height: plot.y1 - plot.y0,
      fill: "none",
      stroke: "#888",
    }),
  );
  for (const t of model.xTicks) {
    svg.appendChild(svgEl("line", { x1: t.px, y1: plot.y1, x2: t.px, y2: plot.y1 + 4, stroke: "#888" }));
    const label = svgEl("text", { x: t.px, y: plot.y1 + 16, "font-size": 10, "text-anchor": "middle", fill: "#444" });
    label.textContent = t.label;
    svg.appendChild(label);
  }
  for (const t of model.yTicks) {
    svg.appendChild(svgEl("line", { x1: plot.x0 - 4, y1: t.py, x2: plot.x1, y2: t.py, stroke: "#eee" }));
    const label = svgEl("text", { x: plot.x0 - 6, y: t.py + 3, "font-size": 10, "text-anchor": "end", fill: "#444" });
    label.textContent = t.label;
    svg.appendChild(label);
  }
  for (const a of model.annotations) {
    const line = svgEl("line", {
      x1: a.px,
      y1: plot.y0,
      x2: a.px,
      y2: plot.y1,
      stroke: "#b07aa1",
      "stroke-dasharray": "3,3",
    });
    const title = svgEl("title", {});
    title.textContent = a.label;
    line.appendChild(title);
    svg.appendChild(line);
  }
  for (const p of model.paths) {
    svg.appendChild(svgEl("path", { d: p.d, fill: "none", stroke: p.color, "stroke-width": 1.6 }));
  }
  if (model.xLabel) {
    const label = svgEl("text", {
      x: (plot.x0 + plot.x1) / 2,
      y: model.viewH - 4,
      "font-size": 10,
      "text-anchor": "middle",
      fill: "#444",
    });
    label.textContent = model.xLabel;
    svg.appendChild(label);
  }
  if (model.yLabel) {
    const label = svgEl("text", {
      x: 10,
      y: (plot.y0 + plot.y1) / 2,
      "font-size": 10,
      "text-anchor": "middle",
      fill: "#444",
      transform: `rotate(-90 10 ${(plot.y0 + plot.y1) / 2})`,
    });
    label.textContent = model.yLabel;
    svg.appendChild(label);
  }
}
