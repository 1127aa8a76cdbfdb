/**
 * Readers for the versioned on-disk formats written by the simulation
 * CLI.  A run directory holds CSV tables whose first line is a schema
 * comment (`# qvdp-table v1 <kind>`) plus a manifest.json echoing the
 * run configuration.  Anything that does not match the documented
 * layout is refused with a SchemaError instead of being guessed at.
 */
import { readFile } from "node:fs/promises";
import { join } from "node:path";

export const TABLE_SCHEMA = "qvdp-table v1";
export const MANIFEST_SCHEMA = "qvdp-manifest v1";

/** A file in the run directory does not match the documented schema. */
export class SchemaError extends Error {}

/** Canonical column order per table kind; unknown kinds are refused. */
export const TABLE_COLUMNS: Record<string, readonly string[]> = {
  wigner: ["re_alpha", "im_alpha", "w"],
  radial: ["radius", "density"],
  phase: ["angle", "density"],
  phase_diff: ["angle", "density"],
  populations: ["n", "p"],
  branches: ["kappa2", "v", "branch", "r", "converged"],
  boundary: ["model", "kappa2", "v_critical", "tolerance", "censored"],
  trajectory: ["t", "re_alpha", "im_alpha"],
  ode: ["t", "x", "dx_dt"],
  ion_rates: ["quantity", "value_hz", "value_kappa1"],
};

export interface Table {
  kind: string;
  /** Column name to values; numeric when every cell parses as a number. */
  columns: Record<string, number[] | string[]>;
  /** Where the table came from, for error messages. */
  source: string;
}

export interface Manifest {
  schema: string;
  scenario: string;
  config: Record<string, unknown>;
  outputs?: string[];
  diagnostics?: Record<string, unknown>;
  [key: string]: unknown;
}

export interface Run {
  dir: string;
  manifest: Manifest;
}

function splitCsvLine(line: string): string[] {
  if (!line.includes('"')) return line.split(",");
  // quoted fields never appear in the tables we write, but the reader
  // should not silently mangle one if it meets it
  const fields: string[] = [];
  let cur = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"' && line[i + 1] === '"') {
        cur += '"';
        i++;
      } else if (ch === '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      fields.push(cur);
      cur = "";
    } else {
      cur += ch;
    }
  }
  fields.push(cur);
  return fields;
}

function parseNumber(text: string): number {
  // repr() on the writing side spells infinities this way
  if (text === "inf") return Infinity;
  if (text === "-inf") return -Infinity;
  if (text === "nan") return NaN;
  if (text.trim() === "") return Number.NaN;
  return Number(text);
}

function isNumericColumn(raw: string[]): boolean {
  return raw.every(
    (cell) => cell === "inf" || cell === "-inf" || cell === "nan" || (cell.trim() !== "" && !Number.isNaN(Number(cell)))
  );
}

/** Parse one CSV table, validating the schema header and column set. */
export function parseTable(text: string, source: string): Table {
  const lines = text.split(/\r?\n/);
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length < 2) {
    throw new SchemaError(`${source}: table is empty`);
  }
  const header = (lines[0] ?? "").trim();
  const prefix = `# ${TABLE_SCHEMA} `;
  if (!header.startsWith(prefix)) {
    throw new SchemaError(`${source}: not a recognized table (header ${JSON.stringify(header)})`);
  }
  const kind = header.slice(prefix.length).trim();
  const expected = TABLE_COLUMNS[kind];
  if (expected === undefined) {
    throw new SchemaError(`${source}: unknown table kind ${JSON.stringify(kind)}`);
  }
  const names = splitCsvLine(lines[1] ?? "");
  if (names.length !== expected.length || expected.some((name, i) => names[i] !== name)) {
    throw new SchemaError(
      `${source}: ${kind} table must have columns ${expected.join(",")}, got ${names.join(",")}`
    );
  }

  const raw: string[][] = names.map(() => []);
  for (let i = 2; i < lines.length; i++) {
    const fields = splitCsvLine(lines[i] ?? "");
    if (fields.length !== names.length) {
      throw new SchemaError(`${source}:${i + 1}: expected ${names.length} fields, got ${fields.length}`);
    }
    for (let j = 0; j < fields.length; j++) raw[j]!.push(fields[j]!);
  }

  const columns: Record<string, number[] | string[]> = {};
  for (let j = 0; j < names.length; j++) {
    const cells = raw[j]!;
    columns[names[j]!] = isNumericColumn(cells) ? cells.map(parseNumber) : cells;
  }
  return { kind, columns, source };
}

async function readText(path: string, missing: string): Promise<string> {
  try {
    return await readFile(path, "utf8");
  } catch (err) {
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      throw new SchemaError(missing);
    }
    throw err;
  }
}

/** Read and validate one table file from a run directory. */
export async function readTable(dir: string, name: string, expectKind: string): Promise<Table> {
  const path = join(dir, name);
  const text = await readText(path, `${dir} has no ${name}; not a complete run directory`);
  const table = parseTable(text, path);
  if (table.kind !== expectKind) {
    throw new SchemaError(`${path}: expected a ${expectKind} table, found ${table.kind}`);
  }
  return table;
}

/** Pull a numeric column or refuse with a readable message. */
export function numericColumn(table: Table, name: string): number[] {
  const col = table.columns[name];
  if (col === undefined || col.length === 0 || typeof col[0] !== "number") {
    throw new SchemaError(`${table.source}: column ${name} is missing or not numeric`);
  }
  return col as number[];
}

export function stringColumn(table: Table, name: string): string[] {
  const col = table.columns[name];
  if (col === undefined) {
    throw new SchemaError(`${table.source}: column ${name} is missing`);
  }
  return col.map(String);
}

/** Read and validate manifest.json; the absence marks a non-run directory. */
export async function readRun(dir: string): Promise<Run> {
  const path = join(dir, "manifest.json");
  const text = await readText(path, `${dir} has no manifest.json; not a run directory`);
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${path}: unreadable JSON (${(err as Error).message})`);
  }
  const manifest = data as Manifest;
  if (typeof manifest !== "object" || manifest === null || manifest.schema !== MANIFEST_SCHEMA) {
    throw new SchemaError(`${path}: unrecognized manifest schema ${JSON.stringify((manifest as Manifest)?.schema)}`);
  }
  if (typeof manifest.scenario !== "string" || typeof manifest.config !== "object" || manifest.config === null) {
    throw new SchemaError(`${path}: manifest needs a scenario and a config block`);
  }
  return { dir, manifest };
}

// --- physical-parameter agreement ---------------------------------------------

// rates that change the physics of a run; everything else in the config
// (seeds, grids, horizons) is protocol and may differ between the two
// sides of an overlay
const PHYSICAL_KEYS = ["kappa2", "v", "delta", "drive_e"] as const;
const OPTIONAL_ZERO = new Set(["v", "delta", "drive_e"]);

/** Physical rates of a run, with absent drive and coupling read as zero. */
export function physicalParameters(run: Run): Record<string, number> {
  const out: Record<string, number> = {};
  for (const key of PHYSICAL_KEYS) {
    const value = run.manifest.config[key];
    if (value === undefined) {
      if (!OPTIONAL_ZERO.has(key)) {
        throw new SchemaError(`${run.dir}: manifest config lacks ${key}`);
      }
      out[key] = 0;
    } else if (typeof value === "number" && Number.isFinite(value)) {
      out[key] = value;
    } else {
      throw new SchemaError(`${run.dir}: manifest config ${key} is not a number`);
    }
  }
  return out;
}

function closeEnough(a: number, b: number): boolean {
  return Math.abs(a - b) <= 1e-9 * Math.max(1, Math.abs(a), Math.abs(b));
}

/** Refuse to overlay two runs whose physical rates disagree. */
export function assertSamePhysics(a: Run, b: Run): void {
  const pa = physicalParameters(a);
  const pb = physicalParameters(b);
  const bad = PHYSICAL_KEYS.filter((key) => !closeEnough(pa[key]!, pb[key]!));
  if (bad.length > 0) {
    const detail = bad.map((key) => `${key} ${pa[key]} vs ${pb[key]}`).join(", ");
    throw new SchemaError(`physical parameters disagree between ${a.dir} and ${b.dir}: ${detail}`);
  }
}
