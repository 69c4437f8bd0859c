export { readTable, requireColumns, filterRows, distinct, numbers } from "./csv.js";
export type { Table, Row } from "./csv.js";
export { fmt, el, text, svgDocument, PALETTE, color } from "./svg.js";
export { linearScale, extent, padded, ticks } from "./scales.js";
export type { Scale } from "./scales.js";
export { quantileSorted, boxStats } from "./stats.js";
export type { BoxStats } from "./stats.js";
export { renderScoreDots } from "./figures/scoreDots.js";
export type { ScoreDotsOptions } from "./figures/scoreDots.js";
export { renderBox } from "./figures/box.js";
export type { BoxOptions } from "./figures/box.js";
export { renderPCurves } from "./figures/pcurves.js";
export type { PCurvesOptions } from "./figures/pcurves.js";
export { renderHeatmap } from "./figures/heatmap.js";
export type { HeatmapOptions } from "./figures/heatmap.js";
export { FigureSpec, PlotSpec, renderFigure, runSpec } from "./spec.js";
