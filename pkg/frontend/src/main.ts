#!/usr/bin/env node
/** CLI entry: plots <kind> --in PATH --out PATH */

import { parseArgs } from "node:util";

import {
  plotDecay,
  plotParabola,
  plotResidualCascade,
  plotScan,
} from "./figures";

const KINDS: Record<string, (inPath: string, outPath: string) => object> = {
  decay: plotDecay,
  parabola: plotParabola,
  "residual-cascade": plotResidualCascade,
  scan: plotScan,
};

const USAGE = `usage: plots <kind> --in PATH --out PATH
  kinds: ${Object.keys(KINDS).join(" | ")}`;

export function run(argv: string[]): number {
  let positionals: string[];
  let values: { in?: string; out?: string };
  try {
    const parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string" },
        out: { type: "string" },
      },
    });
    positionals = parsed.positionals;
    values = parsed.values;
  } catch (e) {
    console.error(`${USAGE}\n(${(e as Error).message})`);
    return 2;
  }
  const kind = positionals[0];
  if (positionals.length !== 1 || kind === undefined || !(kind in KINDS)) {
    console.error(USAGE);
    return 2;
  }
  if (!values.in || !values.out) {
    console.error(USAGE);
    return 2;
  }
  try {
    const summary = KINDS[kind](values.in, values.out);
    console.log(`wrote ${values.out}`);
    for (const [key, value] of Object.entries(summary)) {
      console.log(`  ${key}: ${value}`);
    }
    return 0;
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)));
}
