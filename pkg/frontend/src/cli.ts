#!/usr/bin/env node
/** render --kind <k> --runs <files...> --out <file> */

import { realpathSync, writeFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import yargs from "yargs";
import { exitCodeFor, UsageError } from "./errors.js";
import { FIGURE_KINDS, FigureKind, loadRuns, render } from "./figures.js";

interface Args {
  kind: string;
  runs: string[];
  out: string;
  glyphDt: number;
}

function parseArgs(argv: string[]): Args {
  const parser = yargs(argv)
    .usage("render --kind <k> --runs <files...> --out <file>")
    .option("kind", {
      type: "string",
      describe: FIGURE_KINDS.join("|"),
      demandOption: true,
    })
    .option("runs", {
      type: "string",
      array: true,
      describe: "run CSV files exported by the simulator",
      demandOption: true,
    })
    .option("out", {
      type: "string",
      describe: "output SVG path",
      demandOption: true,
    })
    .option("glyph-dt", {
      type: "number",
      default: 2.0,
      describe: "sim-time spacing of attitude glyphs in traj3d [s]",
    })
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw new UsageError(msg ?? err?.message ?? "invalid arguments");
    });
  const a = parser.parseSync();
  return {
    kind: a.kind,
    runs: a.runs,
    out: a.out,
    glyphDt: a["glyph-dt"] as number,
  };
}

export function runCli(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    if (!(FIGURE_KINDS as readonly string[]).includes(args.kind)) {
      throw new UsageError(
        `unknown figure kind "${args.kind}"; expected one of ${FIGURE_KINDS.join(", ")}`,
      );
    }
    if (args.runs.length === 0) {
      throw new UsageError("at least one run file is required");
    }
    const runs = loadRuns(args.runs);
    const svg = render(args.kind as FigureKind, runs, { glyphDt: args.glyphDt });
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out} (${args.kind}, ${runs.length} runs)`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return exitCodeFor(err);
  }
}

function invokedDirectly(): boolean {
  const entry = process.argv[1];
  if (entry === undefined) return false;
  try {
    return realpathSync(entry) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(runCli(process.argv.slice(2)));
}
