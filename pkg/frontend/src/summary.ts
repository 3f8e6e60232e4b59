/** Reader for the simulator's JSON run summary. */

import { SchemaMismatch } from "./errors.js";

export type ProgressLaw =
  | { kind: "constant" | "sinusoidal"; base: number; amplitude: number; frequency: number }
  | { kind: "distance"; v_nom: number; v_min: number; d_scale: number }
  | { kind: "tracking"; rate: number };

export interface RunSummary {
  label: string;
  config_hash: string;
  mode: string;
  progress_law: ProgressLaw;
  [key: string]: unknown;
}

function num(obj: Record<string, unknown>, key: string, source: string): number {
  const v = obj[key];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new SchemaMismatch(`${source}: progress_law.${key} must be a finite number`);
  }
  return v;
}

function parseLaw(raw: unknown, source: string): ProgressLaw {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SchemaMismatch(`${source}: progress_law must be an object`);
  }
  const obj = raw as Record<string, unknown>;
  switch (obj["kind"]) {
    case "constant":
    case "sinusoidal":
      return {
        kind: obj["kind"],
        base: num(obj, "base", source),
        amplitude: num(obj, "amplitude", source),
        frequency: num(obj, "frequency", source),
      };
    case "distance":
      return {
        kind: "distance",
        v_nom: num(obj, "v_nom", source),
        v_min: num(obj, "v_min", source),
        d_scale: num(obj, "d_scale", source),
      };
    case "tracking":
      return { kind: "tracking", rate: num(obj, "rate", source) };
    default:
      throw new SchemaMismatch(`${source}: unknown progress_law kind ${JSON.stringify(obj["kind"])}`);
  }
}

export function parseSummary(text: string, source = "<input>"): RunSummary {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (e) {
    throw new SchemaMismatch(`${source}: not valid JSON: ${(e as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SchemaMismatch(`${source}: summary must be a JSON object`);
  }
  const obj = raw as Record<string, unknown>;
  for (const key of ["label", "config_hash", "mode"] as const) {
    if (typeof obj[key] !== "string") {
      throw new SchemaMismatch(`${source}: summary field "${key}" must be a string`);
    }
  }
  const law = parseLaw(obj["progress_law"], source);
  return { ...obj, label: obj["label"] as string, config_hash: obj["config_hash"] as string, mode: obj["mode"] as string, progress_law: law };
}

/** Assigned progress speed at one sample; theta for velocity laws,
 * transverse distance for the distance law. */
export function lawSpeed(law: ProgressLaw, theta: number, dPerp: number): number {
  switch (law.kind) {
    case "constant":
    case "sinusoidal":
      return law.base + law.amplitude * Math.sin(law.frequency * theta);
    case "distance":
      return law.v_min + (law.v_nom - law.v_min) * Math.exp(-((dPerp / law.d_scale) ** 2));
    case "tracking":
      return law.rate;
  }
}
