import { z } from "zod";

export const figureKinds = [
  "samples_curve",
  "operators_bars",
  "path_histograms",
  "episodes_curve",
] as const;

export type FigureKind = (typeof figureKinds)[number];

/** How the per-seed values are aggregated into the plotted point + band. */
export const aggregations = ["mean_sd", "mean_var"] as const;
export type Aggregation = (typeof aggregations)[number];

export const figureSpecSchema = z.object({
  kind: z.enum(figureKinds),
  input: z.string().min(1),
  output: z.string().min(1),
  aggregation: z.enum(aggregations).default("mean_sd"),
});

export type FigureSpec = z.infer<typeof figureSpecSchema>;

export class SchemaMismatch extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaMismatch";
  }
}

export class EmptyInput extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EmptyInput";
  }
}

/** Column layout of the harness metrics CSVs. */
export const METRICS_COLUMNS = [
  "seed",
  "task_index",
  "arm",
  "accurate",
  "samples_to_accurate",
  "episodes",
  "operators_transferred",
  "operators_new",
  "levels",
  "level0_nodes",
  "level0_max_path",
  "top_nodes",
  "top_max_path",
] as const;

/** Column layout of the harness path-length histogram CSV. */
export const HIST_COLUMNS = ["seed", "task_index", "level", "length", "count"] as const;
