export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

/** Linear scale mapping domain onto range (degenerate domains map to the
 * range midpoint). */
export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const f = ((v: number) =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function extent(values: number[]): [number, number] {
  if (values.length === 0) throw new Error("extent of empty list");
  let lo = values[0];
  let hi = values[0];
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

/** Pad an extent by a fraction on both sides (degenerate extents by 1). */
export function padded(e: [number, number], frac = 0.08): [number, number] {
  const span = e[1] - e[0];
  const pad = span === 0 ? 1 : span * frac;
  return [e[0] - pad, e[1] + pad];
}

/** Round tick positions covering the domain: about `n` steps of 1/2/5x10^k. */
export function ticks(domain: [number, number], n = 5): number[] {
  const [lo, hi] = domain;
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const out: number[] = [];
  const first = Math.ceil(lo / step - 1e-9);
  const last = Math.floor(hi / step + 1e-9);
  for (let i = first; i <= last; i++) {
    out.push(Number((i * step).toPrecision(12)) + 0);
  }
  return out;
}
