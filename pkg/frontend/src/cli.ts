#!/usr/bin/env node
/**
 * render --kind <kind> --in <csv> --out <svg>
 *        [--highlight w1,w2] [--clip-y N] [--slope S] [--intercept I]
 *        [--delta-min D] [--width W] [--height H] [--echo out.json]
 *
 * Exit codes: 0 success, 1 usage error, 2 data error.
 */

import { existsSync, writeFileSync } from "node:fs";

import { FigureError } from "./csv";
import { FIGURE_KINDS, FigureKind, FigureSpec, render } from "./figures";

interface Flags {
  [key: string]: string;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new UsageError(`unexpected argument ${JSON.stringify(arg)}`);
    }
    const key = arg.slice(2);
    const value = argv[i + 1];
    if (value === undefined || value.startsWith("--")) {
      throw new UsageError(`flag --${key} needs a value`);
    }
    flags[key] = value;
    i++;
  }
  return flags;
}

class UsageError extends Error {}

function buildSpec(flags: Flags): FigureSpec {
  const kind = flags["kind"];
  if (!kind) throw new UsageError("--kind is required");
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new UsageError(
      `unknown kind ${JSON.stringify(kind)}; expected one of ${FIGURE_KINDS.join(", ")}`);
  }
  const input = flags["in"];
  const output = flags["out"];
  if (!input) throw new UsageError("--in is required");
  if (!output) throw new UsageError("--out is required");
  const numeric = (name: string): number | undefined => {
    if (!(name in flags)) return undefined;
    const v = Number(flags[name]);
    if (Number.isNaN(v)) throw new UsageError(`--${name} must be numeric`);
    return v;
  };
  return {
    kind: kind as FigureKind,
    input,
    output,
    highlight: flags["highlight"]?.split(",").map((w) => w.trim()).filter(Boolean),
    clipY: numeric("clip-y"),
    thresholdSlope: numeric("slope"),
    thresholdIntercept: numeric("intercept"),
    deltaMin: numeric("delta-min"),
    width: numeric("width"),
    height: numeric("height"),
  };
}

export function main(argv: string[]): number {
  let flags: Flags;
  let spec: FigureSpec;
  try {
    flags = parseFlags(argv);
    spec = buildSpec(flags);
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`usage error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
  if (!existsSync(spec.input)) {
    process.stderr.write(
      `error: input ${spec.input} does not exist; produce it with the analysis CLI\n`);
    return 2;
  }
  try {
    const result = render(spec);
    if (flags["echo"]) {
      writeFileSync(flags["echo"],
                    JSON.stringify({ kind: spec.kind, values: result.echo }, null, 2) + "\n",
                    "utf-8");
    }
    process.stdout.write(
      `render: ${spec.kind} <- ${spec.input} -> ${spec.output} (${result.echo.length} values)\n`);
    return 0;
  } catch (err) {
    if (err instanceof FigureError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
