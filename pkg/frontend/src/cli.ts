#!/usr/bin/env node
/**
 * plots <spec.json>
 *
 * Render the figure(s) described by a JSON spec file. Relative paths in
 * the spec are resolved against the spec file's directory.
 */
import { readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { pathToFileURL } from "node:url";
import { ZodError } from "zod";
import { runSpec } from "./spec.js";

export function main(argv: string[]): number {
  if (argv.length !== 1 || argv[0] === "-h" || argv[0] === "--help") {
    process.stderr.write("usage: plots <spec.json>\n");
    return argv[0] === "-h" || argv[0] === "--help" ? 0 : 2;
  }
  const specPath = resolve(argv[0]);
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(specPath, "utf8"));
  } catch (e) {
    process.stderr.write(`plots: cannot read ${specPath}: ${(e as Error).message}\n`);
    return 1;
  }
  try {
    const written = runSpec(raw, dirname(specPath));
    for (const out of written) process.stdout.write(`wrote ${out}\n`);
    return 0;
  } catch (e) {
    if (e instanceof ZodError) {
      const issues = e.issues
        .map((i) => `  ${i.path.join(".") || "(root)"}: ${i.message}`)
        .join("\n");
      process.stderr.write(`plots: invalid spec ${specPath}:\n${issues}\n`);
    } else {
      process.stderr.write(`plots: ${(e as Error).message}\n`);
    }
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
