import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { render, sidecarPathFor } from "../src/render.js";
import { EmptyInput, FigureKind, SchemaMismatch } from "../src/types.js";
import { histCsv, metricsCsv } from "./fixtures.js";

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "figgen-"));
}

const KINDS: FigureKind[] = ["samples_curve", "operators_bars", "path_histograms", "episodes_curve"];

function inputFor(kind: FigureKind, dir: string): string {
  const path = join(dir, "input.csv");
  writeFileSync(path, kind === "path_histograms" ? histCsv() : metricsCsv());
  return path;
}

describe("rendering", () => {
  it.each(KINDS)("%s renders from a 5-seed smoke CSV", (kind) => {
    const dir = tmp();
    const out = render({
      kind,
      input: inputFor(kind, dir),
      output: join(dir, "fig.svg"),
      aggregation: "mean_sd",
    });
    const svg = readFileSync(out.imagePath, "utf8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
    expect(readFileSync(out.sidecarPath, "utf8")).toMatch(/\n/);
  });

  it.each(KINDS)("%s is byte-deterministic", (kind) => {
    const dir = tmp();
    const input = inputFor(kind, dir);
    const a = render({ kind, input, output: join(dir, "a.svg"), aggregation: "mean_sd" });
    const b = render({ kind, input, output: join(dir, "b.svg"), aggregation: "mean_sd" });
    expect(readFileSync(a.imagePath, "utf8")).toBe(readFileSync(b.imagePath, "utf8"));
    expect(readFileSync(a.sidecarPath, "utf8")).toBe(readFileSync(b.sidecarPath, "utf8"));
  });

  it("single-seed curve has no error band", () => {
    const dir = tmp();
    const input = join(dir, "one.csv");
    writeFileSync(input, metricsCsv(1));
    const out = render({
      kind: "samples_curve",
      input,
      output: join(dir, "fig.svg"),
      aggregation: "mean_sd",
    });
    const svg = readFileSync(out.imagePath, "utf8");
    expect(svg).not.toContain("<polygon"); // bands are polygons
    expect(svg).toContain("<polyline");
    // sidecar spreads are exactly zero
    for (const line of readFileSync(out.sidecarPath, "utf8").trim().split("\n").slice(1)) {
      expect(Number(line.split(",")[3])).toBe(0);
    }
  });

  it("multi-seed curve draws an error band", () => {
    const dir = tmp();
    const out = render({
      kind: "samples_curve",
      input: inputFor("samples_curve", dir),
      output: join(dir, "fig.svg"),
      aggregation: "mean_sd",
    });
    expect(readFileSync(out.imagePath, "utf8")).toContain("<polygon");
  });

  it("rejects a CSV with the wrong header", () => {
    const dir = tmp();
    const input = join(dir, "bad.csv");
    writeFileSync(input, "a,b,c\n1,2,3\n");
    expect(() =>
      render({ kind: "samples_curve", input, output: join(dir, "f.svg"), aggregation: "mean_sd" }),
    ).toThrow(SchemaMismatch);
  });

  it("rejects an empty CSV and a missing file", () => {
    const dir = tmp();
    const input = join(dir, "empty.csv");
    writeFileSync(input, metricsCsv().split("\n")[0] + "\n");
    expect(() =>
      render({ kind: "samples_curve", input, output: join(dir, "f.svg"), aggregation: "mean_sd" }),
    ).toThrow(EmptyInput);
    expect(() =>
      render({
        kind: "samples_curve",
        input: join(dir, "nope.csv"),
        output: join(dir, "f.svg"),
        aggregation: "mean_sd",
      }),
    ).toThrow(EmptyInput);
  });

  it("sidecar path swaps the image extension", () => {
    expect(sidecarPathFor("/x/fig.svg")).toBe("/x/fig.csv");
    expect(sidecarPathFor("plot.svg")).toBe("plot.csv");
  });
});
