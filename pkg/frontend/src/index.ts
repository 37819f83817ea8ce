export { render, sidecarPathFor } from "./render.js";
export { aggregateBars, aggregateCurve, aggregateHists, fmt, meanSpread } from "./aggregate.js";
export { readHistCsv, readMetricsCsv } from "./csv.js";
export {
  EmptyInput,
  figureSpecSchema,
  HIST_COLUMNS,
  METRICS_COLUMNS,
  SchemaMismatch,
} from "./types.js";
export type { Aggregation, FigureKind, FigureSpec } from "./types.js";
