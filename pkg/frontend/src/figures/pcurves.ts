import { distinct, filterRows, numbers, readTable, requireColumns } from "../csv.js";
import { color, el, fmt, svgDocument, text } from "../svg.js";
import { extent, linearScale, padded } from "../scales.js";
import { DEFAULT_MARGIN, title, xAxis, xLabel, yAxis, yLabel } from "../axes.js";

export interface PCurvesOptions {
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
 * Power curves: mean permutation-test p-value against sample size, one
 * line per model, from a table with columns score, model, n_obs, mean_p.
 * A dashed reference line marks the conventional 0.05 level.
 */
export function renderPCurves(opts: PCurvesOptions): string {
  const table = readTable(opts.input);
  requireColumns(table, opts.input, ["score", "model", "n_obs", "mean_p"]);
  const rows = filterRows(table.rows, "score", opts.score);
  if (rows.length === 0) {
    throw new Error(`${opts.input}: no rows with score=${opts.score}`);
  }
  const models = distinct(rows, "model");

  const width = opts.width ?? 460;
  const height = opts.height ?? 320;
  const m = DEFAULT_MARGIN;
  const x = linearScale(padded(extent(numbers(rows, "n_obs")), 0.05), [m.left, width - m.right]);
  const y = linearScale([0, Math.max(1, ...numbers(rows, "mean_p"))], [height - m.bottom, m.top]);

  const marks: string[] = [
    el("line", {
      x1: x.range[0], y1: y(0.05), x2: x.range[1], y2: y(0.05),
      stroke: "#888", "stroke-width": 1, "stroke-dasharray": "5,4",
    }),
  ];
  models.forEach((mdl, mi) => {
    const mrows = filterRows(rows, "model", mdl)
      .slice()
      .sort((a, b) => Number(a.n_obs) - Number(b.n_obs));
    const pts = mrows.map((r) => [x(Number(r.n_obs)), y(Number(r.mean_p))]);
    if (pts.length > 1) {
      marks.push(el("polyline", {
        points: pts.map(([px, py]) => `${fmt(px)},${fmt(py)}`).join(" "),
        fill: "none", stroke: color(mi), "stroke-width": 1.5,
      }));
    }
    for (const [px, py] of pts) {
      marks.push(el("circle", { cx: px, cy: py, r: 3, fill: color(mi) }));
    }
  });

  const legend = models.flatMap((mdl, mi) => [
    el("circle", { cx: width - m.right - 70, cy: m.top + 6 + mi * 15, r: 3, fill: color(mi) }),
    text(mdl, { x: width - m.right - 62, y: m.top + 10 + mi * 15, "font-size": 11 }),
  ]);

  const parts = [
    title(opts.title ?? `Mean p-value vs sample size (${opts.score})`, width),
    ...yAxis(y, m.left),
    ...xAxis(x, height - m.bottom),
    ...marks,
    ...legend,
    yLabel(opts.ylabel ?? "mean p-value", height),
    xLabel(opts.xlabel ?? "number of observations", width, height),
  ];
  return svgDocument(width, height, parts);
}
