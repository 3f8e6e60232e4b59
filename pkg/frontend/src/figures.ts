/** The four figure kinds built from run exports.
 *
 * Everything here consumes exported columns and summary fields only; no
 * control or dynamics quantity is recomputed.
 */

import { readFileSync, existsSync } from "node:fs";
import { basename } from "node:path";
import { RunTable, parseRunCsv } from "./csv.js";
import { SchemaMismatch, UsageError } from "./errors.js";
import { RunSummary, lawSpeed, parseSummary } from "./summary.js";
import { Panel, TraceStyle, renderFigure } from "./svg.js";

export const FIGURE_KINDS = ["traj3d", "theta-profile", "error-series", "comparison"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface LoadedRun {
  table: RunTable;
  summary: RunSummary | null;
  label: string;
  source: string;
}

export interface RenderOptions {
  /** Sim-time spacing of attitude glyphs in traj3d [s]. */
  glyphDt?: number;
}

// variant colors for the tracking-vs-following comparison; other labels
// fall back to palette order
const VARIANT_COLORS: Record<string, string> = {
  "fig3-tracking": "#d62728",
  "fig3-progressive": "#1f77b4",
  "fig3-medium": "#2ca02c",
  "fig3-conservative": "#ff7f0e",
};

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#ff7f0e",
  "#9467bd",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

function colorFor(label: string, i: number): string {
  return VARIANT_COLORS[label] ?? PALETTE[i % PALETTE.length]!;
}

export function loadRuns(paths: string[]): LoadedRun[] {
  return paths.map((p) => {
    if (!existsSync(p)) {
      throw new UsageError(`run file not found: ${p}`);
    }
    const table = parseRunCsv(readFileSync(p, "utf8"), p);
    const jsonPath = p.replace(/\.csv$/i, "") + ".json";
    let summary: RunSummary | null = null;
    if (existsSync(jsonPath)) {
      summary = parseSummary(readFileSync(jsonPath, "utf8"), jsonPath);
    }
    const label = summary?.label ?? basename(p).replace(/\.csv$/i, "");
    return { table, summary, label, source: p };
  });
}

function requireSummary(run: LoadedRun): RunSummary {
  if (run.summary === null) {
    throw new SchemaMismatch(
      `${run.source}: this figure needs the sibling run summary (.json) with progress_law`,
    );
  }
  return run.summary;
}

/** Assigned progress speed sampled along an exported trajectory. */
function assignedSpeed(run: LoadedRun): Float64Array {
  const law = requireSummary(run).progress_law;
  const n = run.table.rows;
  const theta = law.kind === "constant" || law.kind === "sinusoidal" ? run.table.column("theta") : null;
  const dPerp = law.kind === "distance" ? run.table.column("d_perp") : null;
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = lawSpeed(law, theta ? theta[i]! : 0, dPerp ? dPerp[i]! : 0);
  }
  return out;
}

function solid(color: string): TraceStyle {
  return { color, cls: "trace-solid" };
}

function dashed(color: string): TraceStyle {
  return { color, cls: "trace-dashed", dash: "6 4" };
}

function thetaProfileFigure(runs: LoadedRun[]): string {
  const panel = new Panel();
  panel.title = "progress rate: realized vs assigned";
  panel.xlabel = "t [s]";
  panel.ylabel = "theta rate [1/s]";
  runs.forEach((run, i) => {
    const color = colorFor(run.label, i);
    const t = run.table.column("t");
    panel.trace(t, run.table.column("theta_dot"), solid(color), run.label);
    panel.trace(t, assignedSpeed(run), dashed(color), `${run.label} assigned`);
  });
  return renderFigure([panel], 760, 300);
}

function errorSeriesFigure(runs: LoadedRun[]): string {
  const err = new Panel();
  err.title = "pose error";
  err.xlabel = "t [s]";
  err.ylabel = "log-error norm";
  const lam = new Panel();
  lam.title = "shortest-path sign";
  lam.xlabel = "t [s]";
  lam.ylabel = "lambda";
  runs.forEach((run, i) => {
    const color = colorFor(run.label, i);
    const t = run.table.column("t");
    err.trace(t, run.table.column("err_log_norm"), solid(color), run.label);
    lam.trace(t, run.table.column("lambda"), solid(color));
  });
  return renderFigure([err, lam], 760, 220);
}

const COS30 = Math.cos(Math.PI / 6);
const SIN30 = 0.5;

function isoU(x: number, y: number): number {
  return (x - y) * COS30;
}

function isoV(x: number, y: number, z: number): number {
  return z - (x + y) * SIN30;
}

/** Body-frame axis k rotated by unit quaternion [w,x,y,z]. */
function rotatedAxis(qw: number, qx: number, qy: number, qz: number, k: 0 | 1 | 2): [number, number, number] {
  // columns of the rotation matrix of q
  if (k === 0) {
    return [
      1 - 2 * (qy * qy + qz * qz),
      2 * (qx * qy + qw * qz),
      2 * (qx * qz - qw * qy),
    ];
  }
  if (k === 1) {
    return [
      2 * (qx * qy - qw * qz),
      1 - 2 * (qx * qx + qz * qz),
      2 * (qy * qz + qw * qx),
    ];
  }
  return [
    2 * (qx * qz + qw * qy),
    2 * (qy * qz - qw * qx),
    1 - 2 * (qx * qx + qy * qy),
  ];
}

function traj3dFigure(runs: LoadedRun[], opts: RenderOptions): string {
  const glyphDt = opts.glyphDt ?? 2.0;
  if (!(glyphDt > 0)) throw new UsageError("glyph spacing must be positive");
  const panel = new Panel();
  panel.title = "trajectories (isometric projection)";
  panel.xlabel = "u";
  panel.ylabel = "v";

  const first = runs[0]!;
  const pdx = first.table.column("pdx");
  const pdy = first.table.column("pdy");
  const pdz = first.table.column("pdz");
  const n0 = first.table.rows;
  const refU = new Float64Array(n0);
  const refV = new Float64Array(n0);
  let span = 0;
  for (let i = 0; i < n0; i++) {
    refU[i] = isoU(pdx[i]!, pdy[i]!);
    refV[i] = isoV(pdx[i]!, pdy[i]!, pdz[i]!);
    span = Math.max(span, Math.abs(refU[i]!), Math.abs(refV[i]!));
  }
  panel.trace(refU, refV, { color: "#888888", cls: "trace-dashed", dash: "5 4" }, "reference");

  const axisColors = ["#d62728", "#2ca02c", "#1f77b4"] as const;
  const glyphLen = Math.max(0.08, span * 0.07);
  runs.forEach((run, i) => {
    const color = colorFor(run.label, i);
    const t = run.table.column("t");
    const px = run.table.column("px");
    const py = run.table.column("py");
    const pz = run.table.column("pz");
    const n = run.table.rows;
    const u = new Float64Array(n);
    const v = new Float64Array(n);
    for (let j = 0; j < n; j++) {
      u[j] = isoU(px[j]!, py[j]!);
      v[j] = isoV(px[j]!, py[j]!, pz[j]!);
    }
    panel.trace(u, v, solid(color), run.label);

    const qw = run.table.column("qw");
    const qx = run.table.column("qx");
    const qy = run.table.column("qy");
    const qz = run.table.column("qz");
    let nextGlyph = t[0]!;
    for (let j = 0; j < n; j++) {
      if (t[j]! < nextGlyph - 1e-12) continue;
      nextGlyph += glyphDt;
      for (const k of [0, 1, 2] as const) {
        const a = rotatedAxis(qw[j]!, qx[j]!, qy[j]!, qz[j]!, k);
        const tipX = px[j]! + glyphLen * a[0];
        const tipY = py[j]! + glyphLen * a[1];
        const tipZ = pz[j]! + glyphLen * a[2];
        panel.segment(u[j]!, v[j]!, isoU(tipX, tipY), isoV(tipX, tipY, tipZ), {
          color: axisColors[k],
          width: 1.0,
          cls: "glyph",
        });
      }
    }
  });
  return renderFigure([panel], 760, 460);
}

function comparisonFigure(runs: LoadedRun[]): string {
  const dev = new Panel();
  dev.title = "transverse deviation";
  dev.xlabel = "t [s]";
  dev.ylabel = "d_perp [m]";
  const rate = new Panel();
  rate.title = "progress rate: realized vs assigned";
  rate.xlabel = "t [s]";
  rate.ylabel = "theta rate [1/s]";
  runs.forEach((run, i) => {
    const color = colorFor(run.label, i);
    const t = run.table.column("t");
    dev.trace(t, run.table.column("d_perp"), solid(color), run.label);
    rate.trace(t, run.table.column("theta_dot"), solid(color), run.label);
    rate.trace(t, assignedSpeed(run), dashed(color));
  });
  return renderFigure([dev, rate], 760, 220);
}

export function render(kind: FigureKind, runs: LoadedRun[], opts: RenderOptions = {}): string {
  if (runs.length === 0) {
    throw new UsageError("at least one run file is required");
  }
  switch (kind) {
    case "theta-profile":
      return thetaProfileFigure(runs);
    case "error-series":
      return errorSeriesFigure(runs);
    case "traj3d":
      return traj3dFigure(runs, opts);
    case "comparison":
      return comparisonFigure(runs);
  }
}
