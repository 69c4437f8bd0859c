import { writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { mkdirSync } from "node:fs";
import { z } from "zod";
import { renderScoreDots } from "./figures/scoreDots.js";
import { renderBox } from "./figures/box.js";
import { renderPCurves } from "./figures/pcurves.js";
import { renderHeatmap } from "./figures/heatmap.js";

const common = {
  input: z.string(),
  output: z.string(),
  score: z.string(),
  title: z.string().optional(),
  xlabel: z.string().optional(),
  ylabel: z.string().optional(),
  width: z.number().positive().optional(),
  height: z.number().positive().optional(),
};

/** One figure description, discriminated on `kind`. */
export const FigureSpec = z.discriminatedUnion("kind", [
  z.object({ kind: z.literal("score-dots"), ...common }).strict(),
  z.object({
    kind: z.literal("box"),
    ...common,
    group: z.string().default("model"),
    value: z.string().default("mean_score"),
  }).strict(),
  z.object({ kind: z.literal("pcurves"), ...common }).strict(),
  z.object({
    kind: z.literal("heatmap"),
    ...common,
    x: z.string().optional(),
    y: z.string().optional(),
    value: z.string().optional(),
  }).strict(),
]);

export type FigureSpec = z.infer<typeof FigureSpec>;

/** A spec file holds either a single figure or a list of figures. */
export const PlotSpec = z.union([FigureSpec, z.array(FigureSpec)]);

export type PlotSpec = z.infer<typeof PlotSpec>;

/** Render one figure to its SVG string (no file output). */
export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "score-dots":
      return renderScoreDots(spec);
    case "box":
      return renderBox(spec);
    case "pcurves":
      return renderPCurves(spec);
    case "heatmap":
      return renderHeatmap(spec);
  }
}

/**
 * Validate raw parsed JSON against the spec schema, render every figure,
 * and write each SVG next to the given base directory. Input and output
 * paths in the spec are taken relative to `baseDir`. Returns the list of
 * output paths written.
 */
export function runSpec(raw: unknown, baseDir: string): string[] {
  const parsed = PlotSpec.parse(raw);
  const figures = Array.isArray(parsed) ? parsed : [parsed];
  const written: string[] = [];
  for (const fig of figures) {
    const svg = renderFigure({ ...fig, input: resolve(baseDir, fig.input) });
    const out = resolve(baseDir, fig.output);
    mkdirSync(dirname(out), { recursive: true });
    writeFileSync(out, svg, "utf8");
    written.push(out);
  }
  return written;
}
