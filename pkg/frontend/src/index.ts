export { CsvError, readRmse, readSummary } from "./csv.js";
export type { RmseRow, SummaryRow } from "./csv.js";
export {
  colorFor,
  rmseLayout,
  rmseY,
  transientLayout,
  transientX,
  transientY,
} from "./layout.js";
export type { Bar, BandSeries, RmseLayout, TransientLayout } from "./layout.js";
export { Raster } from "./raster.js";
export { encodePng } from "./png.js";
export { renderRmse, renderTransient } from "./render.js";
export { run } from "./cli.js";
