import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { fmt } from "../src/aggregate.js";
import { render } from "../src/render.js";
import { FigureSpec } from "../src/types.js";
import { histCsv, metricsCsv } from "./fixtures.js";

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "figgen-"));
}

/** Independent two-pass mean/sd, written separately from the Welford
 * implementation the renderer uses. */
function twoPass(values: number[]): { mean: number; sd: number; variance: number } {
  const mean = values.reduce((a, b) => a + b, 0) / values.length;
  const variance =
    values.length > 1
      ? values.reduce((a, b) => a + (b - mean) ** 2, 0) / (values.length - 1)
      : 0;
  return { mean, sd: Math.sqrt(variance), variance };
}

function parseCsv(text: string): Record<string, string>[] {
  const [header, ...rows] = text.trim().split("\n");
  const cols = header.split(",");
  return rows.map((r) => Object.fromEntries(r.split(",").map((v, i) => [cols[i], v])));
}

describe("sidecar aggregates vs independent recomputation", () => {
  it("samples_curve matches two-pass mean/sd to 12 significant digits", () => {
    const dir = tmp();
    const input = join(dir, "metrics.csv");
    writeFileSync(input, metricsCsv());
    const spec: FigureSpec = {
      kind: "samples_curve",
      input,
      output: join(dir, "fig.svg"),
      aggregation: "mean_sd",
    };
    const { sidecarPath } = render(spec);
    const sidecar = parseCsv(readFileSync(sidecarPath, "utf8"));
    const raw = parseCsv(metricsCsv());
    expect(sidecar.length).toBe(20); // 2 arms x 10 tasks
    for (const row of sidecar) {
      const vals = raw
        .filter((r) => r.arm === row.arm && r.task_index === row.task_index)
        .map((r) => Number(r.samples_to_accurate));
      const { mean, sd } = twoPass(vals);
      expect(row.mean).toBe(fmt(mean));
      expect(row.spread).toBe(fmt(sd));
      expect(Number(row.n)).toBe(vals.length);
    }
  });

  it("operators_bars matches hand-computed aggregates with mean_var", () => {
    const dir = tmp();
    const input = join(dir, "metrics.csv");
    writeFileSync(input, metricsCsv());
    const { sidecarPath } = render({
      kind: "operators_bars",
      input,
      output: join(dir, "bars.svg"),
      aggregation: "mean_var",
    });
    const sidecar = parseCsv(readFileSync(sidecarPath, "utf8"));
    const raw = parseCsv(metricsCsv());
    expect(sidecar.length).toBe(20); // 10 tasks x 2 metrics
    for (const row of sidecar) {
      const vals = raw
        .filter((r) => r.task_index === row.task_index)
        .map((r) => Number(r[row.metric]));
      const { mean, variance } = twoPass(vals);
      expect(row.mean).toBe(fmt(mean));
      expect(row.spread).toBe(fmt(variance));
    }
  });

  it("path_histograms matches per-run mean counts, zero-filling absent runs", () => {
    const dir = tmp();
    const input = join(dir, "hists.csv");
    writeFileSync(input, histCsv());
    const { sidecarPath } = render({
      kind: "path_histograms",
      input,
      output: join(dir, "hist.svg"),
      aggregation: "mean_sd",
    });
    const sidecar = parseCsv(readFileSync(sidecarPath, "utf8"));
    const raw = parseCsv(histCsv());
    const runs = [...new Set(raw.map((r) => `${r.seed},${r.task_index}`))];
    for (const row of sidecar) {
      const vals = runs.map((run) => {
        const [seed, task] = run.split(",");
        const hit = raw.find(
          (r) =>
            r.seed === seed &&
            r.task_index === task &&
            r.level === row.level &&
            r.length === row.length,
        );
        return hit ? Number(hit.count) : 0;
      });
      const { mean, sd } = twoPass(vals);
      expect(row.mean).toBe(fmt(mean));
      expect(row.spread).toBe(fmt(sd));
    }
  });

  it("hierarchy sidecar has one trace per level", () => {
    const dir = tmp();
    const input = join(dir, "hists.csv");
    writeFileSync(input, histCsv(5, 2, 3));
    const { sidecarPath } = render({
      kind: "path_histograms",
      input,
      output: join(dir, "hist.svg"),
      aggregation: "mean_sd",
    });
    const sidecar = parseCsv(readFileSync(sidecarPath, "utf8"));
    expect(new Set(sidecar.map((r) => r.level)).size).toBe(3);
  });
});
