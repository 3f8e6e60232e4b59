/** Typed failures, each mapped to a distinct process exit code. */

export class UsageError extends Error {
  readonly exitCode = 2;
}

/** Input file exists but its shape violates the export contract. */
export class SchemaMismatch extends Error {
  readonly exitCode = 3;
}

/** A figure asked for a column the CSV header does not carry. */
export class MissingColumn extends Error {
  readonly exitCode = 4;
}

export function exitCodeFor(err: unknown): number {
  if (err instanceof UsageError || err instanceof SchemaMismatch || err instanceof MissingColumn) {
    return err.exitCode;
  }
  return 1;
}
