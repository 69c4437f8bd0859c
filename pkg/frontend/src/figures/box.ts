import { distinct, filterRows, numbers, readTable, requireColumns } from "../csv.js";
import { color, el, svgDocument } from "../svg.js";
import { extent, linearScale, padded } from "../scales.js";
import { categoryAxis, DEFAULT_MARGIN, title, xLabel, yAxis, yLabel } from "../axes.js";
import { boxStats } from "../stats.js";

export interface BoxOptions {
  input: string;
  /** Which score stream to plot (value of the `score` column). */
  score: string;
  /** Column whose distinct values form the boxes (e.g. "model" or "family"). */
  group: string;
  /** Column holding the values to summarize (e.g. "mean_score"). */
  value: string;
  title?: string;
  xlabel?: string;
  ylabel?: string;
  width?: number;
  height?: number;
}

/**
 * One Tukey box-and-whisker per group from a long-format score table.
 * The `score` filter is skipped when the table has no `score` column
 * (e.g. bootstrap tables already restricted to one score).
 */
export function renderBox(opts: BoxOptions): string {
  const table = readTable(opts.input);
  requireColumns(table, opts.input, [opts.group, opts.value]);
  const rows = table.columns.includes("score")
    ? filterRows(table.rows, "score", opts.score)
    : table.rows;
  if (rows.length === 0) {
    throw new Error(`${opts.input}: no rows with score=${opts.score}`);
  }
  const groups = distinct(rows, opts.group);

  const width = opts.width ?? 420;
  const height = opts.height ?? 320;
  const m = DEFAULT_MARGIN;
  const y = linearScale(padded(extent(numbers(rows, opts.value))), [height - m.bottom, m.top]);
  const step = (width - m.left - m.right) / groups.length;
  const centers = groups.map((_, i) => m.left + (i + 0.5) * step);
  const half = Math.min(22, step * 0.32);

  const marks: string[] = [];
  groups.forEach((g, gi) => {
    const vals = numbers(filterRows(rows, opts.group, g), opts.value);
    const b = boxStats(vals);
    const cx = centers[gi];
    marks.push(el("line", {
      x1: cx, y1: y(b.whiskerLow), x2: cx, y2: y(b.q1), stroke: "#000", "stroke-width": 1,
    }));
    marks.push(el("line", {
      x1: cx, y1: y(b.q3), x2: cx, y2: y(b.whiskerHigh), stroke: "#000", "stroke-width": 1,
    }));
    for (const w of [b.whiskerLow, b.whiskerHigh]) {
      marks.push(el("line", {
        x1: cx - half * 0.5, y1: y(w), x2: cx + half * 0.5, y2: y(w),
        stroke: "#000", "stroke-width": 1,
      }));
    }
    marks.push(el("rect", {
      x: cx - half, y: y(b.q3), width: 2 * half, height: y(b.q1) - y(b.q3),
      fill: color(gi), "fill-opacity": "0.35", stroke: "#000", "stroke-width": 1,
    }));
    marks.push(el("line", {
      x1: cx - half, y1: y(b.median), x2: cx + half, y2: y(b.median),
      stroke: "#000", "stroke-width": 2,
    }));
    for (const v of b.outliers) {
      marks.push(el("circle", {
        cx, cy: y(v), r: 2.2, fill: "none", stroke: "#000", "stroke-width": 1,
      }));
    }
  });

  const parts = [
    title(opts.title ?? `${opts.value} by ${opts.group}`, width),
    ...yAxis(y, m.left),
    ...categoryAxis(groups, centers, height - m.bottom, m.left, width - m.right),
    ...marks,
    yLabel(opts.ylabel ?? opts.value, height),
    xLabel(opts.xlabel ?? opts.group, width, height),
  ];
  return svgDocument(width, height, parts);
}
