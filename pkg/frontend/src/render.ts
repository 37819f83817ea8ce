import { writeFileSync } from "node:fs";

import {
  aggregateBars,
  aggregateCurve,
  aggregateHists,
  BarGroup,
  CurvePoint,
  fmt,
  HistPoint,
} from "./aggregate.js";
import { readHistCsv, readMetricsCsv } from "./csv.js";
import {
  axes,
  band,
  closeSvg,
  HEIGHT,
  legend,
  linearScale,
  MARGIN,
  niceTicks,
  openSvg,
  PALETTE,
  polyline,
  rect,
  WIDTH,
} from "./svg.js";
import { FigureSpec } from "./types.js";

const PLOT = {
  x0: MARGIN.left,
  x1: WIDTH - MARGIN.right,
  y0: HEIGHT - MARGIN.bottom,
  y1: MARGIN.top,
};

export interface RenderResult {
  imagePath: string;
  sidecarPath: string;
}

export function sidecarPathFor(output: string): string {
  return output.replace(/\.[^./]+$/, "") + ".csv";
}

/** Render one figure: writes the SVG and its numeric sidecar CSV. */
export function render(spec: FigureSpec): RenderResult {
  let svg: string;
  let sidecar: string;
  switch (spec.kind) {
    case "samples_curve": {
      const pts = aggregateCurve(readMetricsCsv(spec.input), "samples_to_accurate", spec.aggregation);
      svg = curveSvg(pts, "Samples to accurate model", "task index", "samples");
      sidecar = curveSidecar(pts);
      break;
    }
    case "episodes_curve": {
      const pts = aggregateCurve(readMetricsCsv(spec.input), "episodes", spec.aggregation);
      svg = curveSvg(pts, "Episodes to accurate model", "task index", "episodes");
      sidecar = curveSidecar(pts);
      break;
    }
    case "operators_bars": {
      const bars = aggregateBars(readMetricsCsv(spec.input), spec.aggregation);
      svg = barsSvg(bars);
      sidecar = barsSidecar(bars);
      break;
    }
    case "path_histograms": {
      const pts = aggregateHists(readHistCsv(spec.input), spec.aggregation);
      svg = histSvg(pts);
      sidecar = histSidecar(pts);
      break;
    }
  }
  const sidecarPath = sidecarPathFor(spec.output);
  writeFileSync(spec.output, svg);
  writeFileSync(sidecarPath, sidecar);
  return { imagePath: spec.output, sidecarPath };
}

// --- curves ------------------------------------------------------------------

function curveSidecar(pts: CurvePoint[]): string {
  const lines = ["arm,task_index,mean,spread,n"];
  for (const p of pts) {
    lines.push(`${p.arm},${p.taskIndex},${fmt(p.mean)},${fmt(p.spread)},${p.n}`);
  }
  return lines.join("\n") + "\n";
}

function curveSvg(pts: CurvePoint[], title: string, xLabel: string, yLabel: string): string {
  const arms = [...new Set(pts.map((p) => p.arm))].sort();
  const xs = pts.map((p) => p.taskIndex);
  const los = pts.map((p) => p.mean - p.spread);
  const his = pts.map((p) => p.mean + p.spread);
  const sx = linearScale(Math.min(...xs), Math.max(...xs), PLOT.x0, PLOT.x1);
  const yLo = Math.min(0, ...los);
  const yHi = Math.max(...his, 1);
  const sy = linearScale(yLo, yHi, PLOT.y0, PLOT.y1);
  const parts = openSvg(title);
  axes(
    parts,
    xLabel,
    yLabel,
    [...new Set(xs)].sort((a, b) => a - b).map((v) => ({ v, sx: sx(v) })),
    niceTicks(yLo, yHi).map((v) => ({ v, sy: sy(v) })),
  );
  arms.forEach((arm, i) => {
    const color = PALETTE[i % PALETTE.length];
    const series = pts.filter((p) => p.arm === arm);
    if (series.some((p) => p.spread > 0)) {
      parts.push(
        band(
          series.map((p) => [sx(p.taskIndex), sy(p.mean + p.spread)]),
          series.map((p) => [sx(p.taskIndex), sy(p.mean - p.spread)]),
          color,
        ),
      );
    }
    parts.push(polyline(series.map((p) => [sx(p.taskIndex), sy(p.mean)]), color));
  });
  legend(parts, arms.map((a, i) => ({ label: a, color: PALETTE[i % PALETTE.length] })));
  return closeSvg(parts);
}

// --- bars --------------------------------------------------------------------

function barsSidecar(bars: BarGroup[]): string {
  const lines = ["task_index,metric,mean,spread,n"];
  for (const b of bars) {
    lines.push(`${b.taskIndex},${b.metric},${fmt(b.mean)},${fmt(b.spread)},${b.n}`);
  }
  return lines.join("\n") + "\n";
}

function barsSvg(bars: BarGroup[]): string {
  const tasks = [...new Set(bars.map((b) => b.taskIndex))].sort((a, b) => a - b);
  const metrics = [...new Set(bars.map((b) => b.metric))];
  const yHi = Math.max(1, ...bars.map((b) => b.mean + b.spread));
  const sy = linearScale(0, yHi, PLOT.y0, PLOT.y1);
  const group = (PLOT.x1 - PLOT.x0) / tasks.length;
  const bw = (group * 0.8) / metrics.length;
  const parts = openSvg("Operators transferred vs newly learned");
  axes(
    parts,
    "task index",
    "operators",
    tasks.map((t, i) => ({ v: t, sx: PLOT.x0 + (i + 0.5) * group })),
    niceTicks(0, yHi).map((v) => ({ v, sy: sy(v) })),
  );
  bars.forEach((b) => {
    const ti = tasks.indexOf(b.taskIndex);
    const mi = metrics.indexOf(b.metric);
    const x = PLOT.x0 + ti * group + group * 0.1 + mi * bw;
    const color = PALETTE[mi % PALETTE.length];
    parts.push(rect(x, sy(b.mean), bw * 0.92, PLOT.y0 - sy(b.mean), color));
    if (b.spread > 0) {
      const cx = x + (bw * 0.92) / 2;
      parts.push(
        `<line x1="${cx.toFixed(3)}" y1="${sy(b.mean - b.spread).toFixed(3)}" x2="${cx.toFixed(3)}" y2="${sy(b.mean + b.spread).toFixed(3)}" stroke="black"/>`,
      );
    }
  });
  legend(parts, metrics.map((m, i) => ({ label: m, color: PALETTE[i % PALETTE.length] })));
  return closeSvg(parts);
}

// --- histograms --------------------------------------------------------------

function histSidecar(pts: HistPoint[]): string {
  const lines = ["level,length,mean,spread,n"];
  for (const p of pts) {
    lines.push(`${p.level},${p.length},${fmt(p.mean)},${fmt(p.spread)},${p.n}`);
  }
  return lines.join("\n") + "\n";
}

function histSvg(pts: HistPoint[]): string {
  const levels = [...new Set(pts.map((p) => p.level))].sort((a, b) => a - b);
  const maxLen = Math.max(...pts.map((p) => p.length));
  const yHi = Math.max(1, ...pts.map((p) => p.mean));
  const sx = linearScale(0, maxLen + 1, PLOT.x0, PLOT.x1);
  const sy = linearScale(0, yHi, PLOT.y0, PLOT.y1);
  const parts = openSvg("Shortest-path-length distribution by level");
  axes(
    parts,
    "path length",
    "mean count per run",
    niceTicks(0, maxLen + 1).map((v) => ({ v, sx: sx(v) })),
    niceTicks(0, yHi).map((v) => ({ v, sy: sy(v) })),
  );
  const slot = sx(1) - sx(0);
  const bw = (slot * 0.8) / levels.length;
  for (const p of pts) {
    const li = levels.indexOf(p.level);
    const x = sx(p.length) - slot * 0.4 + li * bw;
    parts.push(rect(x, sy(p.mean), bw * 0.95, PLOT.y0 - sy(p.mean), PALETTE[li % PALETTE.length]));
  }
  legend(parts, levels.map((l, i) => ({ label: `level ${l}`, color: PALETTE[i % PALETTE.length] })));
  return closeSvg(parts);
}
