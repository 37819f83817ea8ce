/** Deterministic synthetic harness CSVs mimicking a 5-seed smoke run. */

import { HIST_COLUMNS, METRICS_COLUMNS } from "../src/types.js";

// tiny deterministic LCG so fixture values are stable across runs/platforms
function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1664525 + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}

export function metricsCsv(seeds = 5, tasks = 10, arms = ["transfer", "baseline"]): string {
  const rnd = lcg(7);
  const lines = [METRICS_COLUMNS.join(",")];
  for (let seed = 0; seed < seeds; seed++) {
    for (const arm of arms) {
      for (let t = 1; t <= tasks; t++) {
        const decay = arm === "transfer" ? Math.max(1, 6 - t) : 5;
        const samples = 200 * (decay + Math.floor(rnd() * 3));
        const episodes = samples / 200;
        const transferred = arm === "transfer" ? Math.min(24, (t - 1) * 4 + Math.floor(rnd() * 3)) : 0;
        const fresh = Math.max(1, 20 - transferred + Math.floor(rnd() * 2));
        lines.push(
          `${seed},${t},${arm},1,${samples},${episodes},${transferred},${fresh},3,30,20,2,1`,
        );
      }
    }
  }
  return lines.join("\n") + "\n";
}

export function histCsv(seeds = 5, tasks = 2, levels = 3): string {
  const rnd = lcg(13);
  const lines = [HIST_COLUMNS.join(",")];
  for (let seed = 0; seed < seeds; seed++) {
    for (let t = 1; t <= tasks; t++) {
      for (let lv = 0; lv < levels; lv++) {
        const maxLen = 8 - 3 * lv;
        for (let len = 1; len <= maxLen; len++) {
          lines.push(`${seed},${t},${lv},${len},${1 + Math.floor(rnd() * 9)}`);
        }
      }
    }
  }
  return lines.join("\n") + "\n";
}
