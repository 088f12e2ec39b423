#!/usr/bin/env node
/**
 * render --fig {1|2|3} --in <dir> --out <file.svg>
 *
 * Reads the simulator's CSV/JSON dataset from <dir> and writes one SVG.
 * Exit codes: 0 success, 1 render failure (bad data), 2 usage error.
 */

import { writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { renderFigure, type FigureId } from "./figures.js";

const USAGE = "usage: render --fig {1|2|3} --in <dir> --out <file.svg>";

export function main(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        fig: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
      },
      allowPositionals: false,
    }));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    console.error(USAGE);
    return 2;
  }

  const fig = Number(values.fig);
  if (![1, 2, 3].includes(fig) || !values.in || !values.out) {
    console.error(USAGE);
    return 2;
  }

  try {
    const svg = renderFigure({
      figure: fig as FigureId,
      inputDir: values.in,
      outPath: values.out,
    });
    writeFileSync(values.out, svg, "utf8");
  } catch (err) {
    console.error(`render failed: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  return 0;
}

// run directly (not when imported by tests)
if (
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(main(process.argv.slice(2)));
}
