import { z } from "zod";

// === persisted-run schema =================================================

export const KNOWN_SCHEMA_VERSIONS: readonly number[] = [1];

export class RunDirError extends Error {}
export class SchemaError extends Error {}

const checkSchema = z.object({
  passed: z.boolean(),
  margin: z.number(),
  detail: z.string(),
});

export const seriesMetaSchema = z.object({
  name: z.string().min(1),
  file: z.string().min(1),
  sha256: z.string(),
  columns: z.array(z.string()).min(1),
  rows: z.number().int().nonnegative(),
});

export const summarySchema = z
  .object({
    schema_version: z.number().int(),
    kind: z.string().min(1),
    config: z
      .object({
        kind: z.string(),
        options: z.record(z.unknown()),
        seed: z.number(),
      })
      .passthrough(),
    seed: z.number(),
    metrics: z.record(z.number()),
    checks: z.record(checkSchema),
    series: z.array(seriesMetaSchema),
    checksum: z.string(),
  })
  .passthrough();

export const manifestSchema = z
  .object({
    config_hash: z.string().regex(/^[0-9a-f]{64}$/),
    seed: z.number(),
  })
  .passthrough();

export type Summary = z.infer<typeof summarySchema>;
export type SeriesMeta = z.infer<typeof seriesMetaSchema>;
export type Manifest = z.infer<typeof manifestSchema>;

export function parseSummary(text: string, source: string): Summary {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${source}: not valid JSON (${(err as Error).message})`);
  }
  // version gate comes first: an unknown version must be refused outright,
  // not reported as a field-by-field shape mismatch
  const version = (raw as { schema_version?: unknown })?.schema_version;
  if (typeof version !== "number" || !KNOWN_SCHEMA_VERSIONS.includes(version)) {
    throw new SchemaError(`${source}: unknown summary schema version ${JSON.stringify(version)}`);
  }
  const parsed = summarySchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    throw new SchemaError(`${source}: ${issue.path.join(".") || "summary"} ${issue.message}`);
  }
  return parsed.data;
}

export function parseManifest(text: string, source: string): Manifest {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${source}: not valid JSON (${(err as Error).message})`);
  }
  const parsed = manifestSchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    throw new SchemaError(`${source}: ${issue.path.join(".") || "manifest"} ${issue.message}`);
  }
  return parsed.data;
}
