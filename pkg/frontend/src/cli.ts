#!/usr/bin/env node
/**
 * Command line wrapper: one figure per invocation.
 *
 *   qvdp-figures --figure 1 --pair CLASSICAL:QUANTUM --pair CLASSICAL:QUANTUM --out fig1.svg
 *   qvdp-figures --figure 4 --branches DIR --boundary DIR --out fig4.svg
 *
 * Pair arguments name two run directories separated by a colon, the
 * classical one first.  Exit code 2 marks bad usage or inputs that do
 * not match the documented run-directory schema.
 */
import { realpathSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { parseArgs } from "node:util";

import { FigureSpec, RunPair, renderFigureToFile } from "./figures.js";
import { SchemaError } from "./table.js";

const USAGE = `usage: qvdp-figures --figure N --out FILE [inputs]
  figures 1-3   --pair CLASSICAL_DIR:QUANTUM_DIR   (given twice)
  figure 4      --branches DIR --boundary DIR [--classical-branches DIR]`;

function parsePair(text: string): RunPair {
  const sep = text.indexOf(":");
  if (sep <= 0 || sep === text.length - 1) {
    throw new SchemaError(`--pair wants CLASSICAL_DIR:QUANTUM_DIR, got ${JSON.stringify(text)}`);
  }
  return { classical: text.slice(0, sep), quantum: text.slice(sep + 1) };
}

export async function main(argv: string[]): Promise<number> {
  let spec: FigureSpec;
  let out: string;
  try {
    const { values } = parseArgs({
      args: argv,
      options: {
        figure: { type: "string" },
        pair: { type: "string", multiple: true },
        branches: { type: "string" },
        boundary: { type: "string" },
        "classical-branches": { type: "string" },
        out: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
    if (values.help) {
      console.log(USAGE);
      return 0;
    }
    const figure = Number(values.figure);
    if (!Number.isInteger(figure) || values.out === undefined) {
      throw new SchemaError("both --figure and --out are required");
    }
    out = values.out;
    spec = {
      figure,
      pairs: values.pair?.map(parsePair),
      branches: values.branches,
      boundary: values.boundary,
      classicalBranches: values["classical-branches"],
    };
  } catch (err) {
    console.error(String((err as Error).message ?? err));
    console.error(USAGE);
    return 2;
  }

  try {
    await renderFigureToFile(spec, out);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
  console.log(`wrote ${out}`);
  return 0;
}

// run directly only when invoked as a script, not when imported by tests;
// realpath resolves the bin symlink npm installs for the entry point
function isEntryPoint(): boolean {
  const invoked = process.argv[1];
  if (invoked === undefined) return false;
  try {
    return fileURLToPath(import.meta.url) === realpathSync(invoked);
  } catch {
    return false;
  }
}

if (isEntryPoint()) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
