import { distinct, filterRows, numbers, readTable, requireColumns, Row } from "../csv.js";
import { color, el, svgDocument, text } from "../svg.js";
import { extent, linearScale, padded } from "../scales.js";
import { categoryAxis, DEFAULT_MARGIN, title, xLabel, yAxis, yLabel } from "../axes.js";

export interface ScoreDotsOptions {
  input: string;
  /** Which score stream to plot (value of the `score` column). */
  score: string;
  title?: string;
  xlabel?: string;
  ylabel?: string;
  width?: number;
  height?: number;
}

/**
 * Mean-score dot plot from a cross-scoring table (columns score, truth,
 * forecast, mean_score). One column of dots per truth model, one colored
 * dot per forecast; the self-forecast cell (truth == forecast) is drawn
 * as a plus marker so the "true model wins" pattern is visible at a glance.
 */
export function renderScoreDots(opts: ScoreDotsOptions): string {
  const table = readTable(opts.input);
  requireColumns(table, opts.input, ["score", "truth", "forecast", "mean_score"]);
  const rows = filterRows(table.rows, "score", opts.score);
  if (rows.length === 0) {
    throw new Error(`${opts.input}: no rows with score=${opts.score}`);
  }
  const truths = distinct(rows, "truth");
  const forecasts = distinct(rows, "forecast");

  const width = opts.width ?? 460;
  const height = opts.height ?? 320;
  const m = DEFAULT_MARGIN;
  const y = linearScale(padded(extent(numbers(rows, "mean_score"))), [height - m.bottom, m.top]);
  const step = (width - m.left - m.right) / truths.length;
  const centers = truths.map((_, i) => m.left + (i + 0.5) * step);

  const marks: string[] = [];
  truths.forEach((g, gi) => {
    forecasts.forEach((f, fi) => {
      const cell = rows.find((r: Row) => String(r.truth) === g && String(r.forecast) === f);
      if (!cell) throw new Error(`${opts.input}: missing cell truth=${g} forecast=${f}`);
      const cx = centers[gi] + (fi - (forecasts.length - 1) / 2) * 9;
      const cy = y(Number(cell.mean_score));
      if (f === g) {
        marks.push(el("line", {
          x1: cx - 4.5, y1: cy, x2: cx + 4.5, y2: cy,
          stroke: color(fi), "stroke-width": 2,
        }));
        marks.push(el("line", {
          x1: cx, y1: cy - 4.5, x2: cx, y2: cy + 4.5,
          stroke: color(fi), "stroke-width": 2,
        }));
      } else {
        marks.push(el("circle", { cx, cy, r: 3.2, fill: color(fi) }));
      }
    });
  });

  const legend = forecasts.flatMap((f, fi) => [
    el("circle", { cx: width - m.right - 70, cy: m.top + 6 + fi * 15, r: 3.2, fill: color(fi) }),
    text(f, { x: width - m.right - 62, y: m.top + 10 + fi * 15, "font-size": 11 }),
  ]);

  const parts = [
    title(opts.title ?? `Mean ${opts.score} score by forecast`, width),
    ...yAxis(y, m.left),
    ...categoryAxis(truths, centers, height - m.bottom, m.left, width - m.right),
    ...marks,
    ...legend,
    yLabel(opts.ylabel ?? "mean score", height),
    xLabel(opts.xlabel ?? "data-generating model", width, height),
  ];
  return svgDocument(width, height, parts);
}
