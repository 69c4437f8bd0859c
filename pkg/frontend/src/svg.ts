/**
 * Minimal deterministic SVG assembly. Attributes are emitted in the order
 * given and numbers are formatted through one fixed rule, so identical
 * inputs always produce byte-identical documents.
 */

export type Attrs = Record<string, string | number>;

/** Fixed numeric formatting: up to 3 decimal places, no trailing zeros. */
export function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`cannot format ${v}`);
  const s = v.toFixed(3);
  return s.replace(/\.?0+$/, "") || "0";
}

function attrString(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join("");
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  if (children.length === 0) return `<${tag}${attrString(attrs)}/>`;
  return `<${tag}${attrString(attrs)}>${children.join("")}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
  return `<text${attrString(attrs)}>${escapeText(content)}</text>`;
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function svgDocument(width: number, height: number, children: string[]): string {
  const open =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${fmt(width)}" ` +
    `height="${fmt(height)}" viewBox="0 0 ${fmt(width)} ${fmt(height)}" ` +
    `font-family="Helvetica, Arial, sans-serif">`;
  return [open, ...children, "</svg>", ""].join("\n");
}

/** Categorical palette (colorblind-safe Okabe-Ito order). */
export const PALETTE = [
  "#0072b2",
  "#d55e00",
  "#009e73",
  "#cc79a7",
  "#e69f00",
  "#56b4e9",
  "#f0e442",
  "#000000",
];

export function color(i: number): string {
  return PALETTE[i % PALETTE.length];
}
