import { el, fmt, text } from "./svg.js";
import { Scale, ticks } from "./scales.js";

/** Margins around the plotting region, in pixels. */
export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 34, right: 16, bottom: 46, left: 58 };

/** Left-hand numeric axis: baseline, tick marks, and value labels. */
export function yAxis(scale: Scale, x: number, n = 5): string[] {
  const parts: string[] = [
    el("line", {
      x1: x, y1: scale.range[0], x2: x, y2: scale.range[1],
      stroke: "#000", "stroke-width": 1,
    }),
  ];
  for (const t of ticks(scale.domain, n)) {
    const y = scale(t);
    parts.push(el("line", { x1: x - 5, y1: y, x2: x, y2: y, stroke: "#000", "stroke-width": 1 }));
    parts.push(text(fmt(t), {
      x: x - 8, y: y + 3.5, "font-size": 11, "text-anchor": "end",
    }));
  }
  return parts;
}

/** Bottom numeric axis at vertical position `y`. */
export function xAxis(scale: Scale, y: number, n = 5): string[] {
  const parts: string[] = [
    el("line", {
      x1: scale.range[0], y1: y, x2: scale.range[1], y2: y,
      stroke: "#000", "stroke-width": 1,
    }),
  ];
  for (const t of ticks(scale.domain, n)) {
    const x = scale(t);
    parts.push(el("line", { x1: x, y1: y, x2: x, y2: y + 5, stroke: "#000", "stroke-width": 1 }));
    parts.push(text(fmt(t), { x, y: y + 17, "font-size": 11, "text-anchor": "middle" }));
  }
  return parts;
}

/** Bottom categorical axis: one centered label per category. */
export function categoryAxis(
  labels: string[],
  centers: number[],
  y: number,
  x0: number,
  x1: number,
): string[] {
  const parts: string[] = [
    el("line", { x1: x0, y1: y, x2: x1, y2: y, stroke: "#000", "stroke-width": 1 }),
  ];
  labels.forEach((lab, i) => {
    parts.push(text(lab, {
      x: centers[i], y: y + 17, "font-size": 11, "text-anchor": "middle",
    }));
  });
  return parts;
}

export function title(label: string, width: number): string {
  return text(label, {
    x: width / 2, y: 20, "font-size": 14, "text-anchor": "middle", "font-weight": "bold",
  });
}

export function yLabel(label: string, height: number): string {
  return text(label, {
    x: 14, y: height / 2, "font-size": 12, "text-anchor": "middle",
    transform: `rotate(-90 14 ${fmt(height / 2)})`,
  });
}

export function xLabel(label: string, width: number, height: number): string {
  return text(label, {
    x: width / 2, y: height - 8, "font-size": 12, "text-anchor": "middle",
  });
}
