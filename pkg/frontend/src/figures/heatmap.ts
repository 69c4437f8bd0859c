import { distinct, filterRows, numbers, readTable, requireColumns, Row } from "../csv.js";
import { el, fmt, svgDocument, text } from "../svg.js";
import { DEFAULT_MARGIN, title, xLabel, yLabel } from "../axes.js";

export interface HeatmapOptions {
  input: string;
  /** Which score stream to plot (value of the `score` column). */
  score: string;
  /** Column giving cell column positions (default "alpha"). */
  x?: string;
  /** Column giving cell row positions (default "eta"). */
  y?: string;
  /** Column holding the cell values (default "mean_score"). */
  value?: string;
  title?: string;
  xlabel?: string;
  ylabel?: string;
  width?: number;
  height?: number;
}

/** Interpolate a perceptually ordered light-to-dark blue ramp at t in [0,1]. */
function ramp(t: number): string {
  const stops: [number, number, number][] = [
    [247, 251, 255],
    [107, 174, 214],
    [8, 48, 107],
  ];
  const pos = Math.min(Math.max(t, 0), 1) * (stops.length - 1);
  const i = Math.min(Math.floor(pos), stops.length - 2);
  const f = pos - i;
  const c = stops[i].map((a, k) => Math.round(a + f * (stops[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

/**
 * Parameter-grid heatmap from a long-format table (one row per grid cell).
 * Cells are shaded light (best = lowest value) to dark and annotated with
 * their value, so the minimizing cell is readable directly.
 */
export function renderHeatmap(opts: HeatmapOptions): string {
  const xcol = opts.x ?? "alpha";
  const ycol = opts.y ?? "eta";
  const vcol = opts.value ?? "mean_score";
  const table = readTable(opts.input);
  requireColumns(table, opts.input, ["score", xcol, ycol, vcol]);
  const rows = filterRows(table.rows, "score", opts.score);
  if (rows.length === 0) {
    throw new Error(`${opts.input}: no rows with score=${opts.score}`);
  }
  const xs = distinct(rows, xcol).sort((a, b) => Number(a) - Number(b));
  const ys = distinct(rows, ycol).sort((a, b) => Number(a) - Number(b));
  const vals = numbers(rows, vcol);
  const lo = Math.min(...vals);
  const hi = Math.max(...vals);

  const width = opts.width ?? 440;
  const height = opts.height ?? 360;
  const m = DEFAULT_MARGIN;
  const cw = (width - m.left - m.right) / xs.length;
  const ch = (height - m.top - m.bottom) / ys.length;

  const marks: string[] = [];
  xs.forEach((xv, xi) => {
    ys.forEach((yv, yi) => {
      const cell = rows.find(
        (r: Row) => String(r[xcol]) === xv && String(r[ycol]) === yv,
      );
      if (!cell) throw new Error(`${opts.input}: missing cell ${xcol}=${xv} ${ycol}=${yv}`);
      const v = Number(cell[vcol]);
      const t = hi > lo ? (v - lo) / (hi - lo) : 0;
      const px = m.left + xi * cw;
      // Rows run bottom-up so larger y-parameter values sit higher.
      const py = m.top + (ys.length - 1 - yi) * ch;
      marks.push(el("rect", {
        x: px, y: py, width: cw, height: ch,
        fill: ramp(t), stroke: "#fff", "stroke-width": 1,
      }));
      marks.push(text(fmt(v), {
        x: px + cw / 2, y: py + ch / 2 + 3.5, "font-size": 10,
        "text-anchor": "middle", fill: t > 0.6 ? "#fff" : "#000",
      }));
    });
  });
  xs.forEach((xv, xi) => {
    marks.push(text(xv, {
      x: m.left + (xi + 0.5) * cw, y: height - m.bottom + 15,
      "font-size": 11, "text-anchor": "middle",
    }));
  });
  ys.forEach((yv, yi) => {
    marks.push(text(yv, {
      x: m.left - 6, y: m.top + (ys.length - 1 - yi + 0.5) * ch + 3.5,
      "font-size": 11, "text-anchor": "end",
    }));
  });

  const parts = [
    title(opts.title ?? `Mean ${opts.score} score over parameter grid`, width),
    ...marks,
    yLabel(opts.ylabel ?? ycol, height),
    xLabel(opts.xlabel ?? xcol, width, height),
  ];
  return svgDocument(width, height, parts);
}
