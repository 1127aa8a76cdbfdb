/** Synthetic run directories mimicking the simulation CLI's output. */
import { mkdir, writeFile } from "node:fs/promises";
import { join } from "node:path";

export type Cell = number | string;

export interface TableData {
  kind: string;
  columns: Record<string, Cell[]>;
}

function cell(x: Cell): string {
  if (typeof x === "number") {
    if (x === Infinity) return "inf";
    if (x === -Infinity) return "-inf";
    if (Number.isNaN(x)) return "nan";
    return String(x);
  }
  return x;
}

export async function writeTableFile(dir: string, name: string, data: TableData): Promise<void> {
  const names = Object.keys(data.columns);
  const rows = data.columns[names[0]!]!.length;
  const lines = [`# qvdp-table v1 ${data.kind}`, names.join(",")];
  for (let i = 0; i < rows; i++) {
    lines.push(names.map((n) => cell(data.columns[n]![i]!)).join(","));
  }
  await writeFile(join(dir, name), lines.join("\n") + "\n", "utf8");
}

export async function writeRunDir(
  dir: string,
  scenario: string,
  config: Record<string, unknown>,
  tables: Record<string, TableData>
): Promise<string> {
  await mkdir(dir, { recursive: true });
  for (const [name, data] of Object.entries(tables)) {
    await writeTableFile(dir, name, data);
  }
  const manifest = {
    schema: "qvdp-manifest v1",
    scenario,
    config,
    outputs: Object.keys(tables).sort(),
    wall_time_s: 0.01,
    diagnostics: {},
    versions: { qvdp: "test" },
  };
  await writeFile(join(dir, "manifest.json"), JSON.stringify(manifest, null, 1), "utf8");
  return dir;
}

// --- synthetic table contents -------------------------------------------------

/** Ring-shaped density on an n x n grid, the generic phase-space shape. */
export function ringWigner(n = 9, extent = 3, radius = 1.5): TableData {
  const axis = Array.from({ length: n }, (_, i) => -extent + (2 * extent * i) / (n - 1));
  const re: number[] = [];
  const im: number[] = [];
  const w: number[] = [];
  for (const x of axis) {
    for (const y of axis) {
      re.push(x);
      im.push(y);
      const r = Math.hypot(x, y);
      w.push(Math.exp(-((r - radius) ** 2) / 0.3));
    }
  }
  return { kind: "wigner", columns: { re_alpha: re, im_alpha: im, w } };
}

export function radialTable(n = 30, rMax = 3, peak = 1.5): TableData {
  const radius = Array.from({ length: n }, (_, i) => (rMax * (i + 0.5)) / n);
  const density = radius.map((r) => r * Math.exp(-((r - peak) ** 2) / 0.3));
  return { kind: "radial", columns: { radius, density } };
}

export function phaseTable(kind: "phase" | "phase_diff", n = 48, bump = 0.05): TableData {
  const angle = Array.from({ length: n }, (_, i) => -Math.PI + (2 * Math.PI * (i + 0.5)) / n);
  const density = angle.map((a) => 1 / (2 * Math.PI) + bump * Math.cos(2 * a));
  return { kind, columns: { angle, density } };
}

export function branchesTable(kappa2 = 0.005): TableData {
  const vs = [0.2, 0.4, 0.6, 0.8, 1.0];
  const amp = Math.sqrt(1 / (2 * kappa2) + 1);
  const kappa2Col: number[] = [];
  const v: number[] = [];
  const branch: string[] = [];
  const r: number[] = [];
  const converged: number[] = [];
  for (const name of ["synchronized", "unsynchronized"]) {
    for (const vi of vs) {
      kappa2Col.push(kappa2);
      v.push(vi);
      branch.push(name);
      r.push(name === "synchronized" ? amp * (0.9 + 0.02 * vi) : 0.001);
      converged.push(1);
    }
  }
  return { kind: "branches", columns: { kappa2: kappa2Col, v, branch, r, converged } };
}

export function boundaryTable(withCensored = false): TableData {
  const model: string[] = [];
  const kappa2: number[] = [];
  const vc: number[] = [];
  const tol: number[] = [];
  const censored: number[] = [];
  for (const name of ["classical", "quantum"]) {
    for (const k2 of [0.005, 0.05, 0.5]) {
      model.push(name);
      kappa2.push(k2);
      vc.push((name === "classical" ? 1.0 : 0.9) * 10 * k2 + 0.5);
      tol.push(0.05);
      censored.push(0);
    }
    if (withCensored) {
      model.push(name);
      kappa2.push(5.0);
      vc.push(Infinity);
      tol.push(Infinity);
      censored.push(1);
    }
  }
  return {
    kind: "boundary",
    columns: { model, kappa2, v_critical: vc, tolerance: tol, censored },
  };
}

/** One classical plus one quantum single-oscillator run at the same rates. */
export async function writeSinglePair(
  root: string,
  kappa2: number,
  extra: Record<string, unknown> = {}
): Promise<{ classical: string; quantum: string }> {
  const tag = String(kappa2).replace(".", "p");
  const classical = await writeRunDir(
    join(root, `classical-${tag}`),
    "classical-ensemble",
    { kappa2, seed: 7, realizations: 50, ...extra },
    {
      "wigner.csv": ringWigner(),
      "radial.csv": radialTable(),
      "phase.csv": phaseTable("phase"),
    }
  );
  const quantum = await writeRunDir(
    join(root, `quantum-${tag}`),
    "single",
    { kappa2, n_max: 20, ...extra },
    {
      "wigner.csv": ringWigner(11),
      "radial.csv": radialTable(25),
      "phase.csv": phaseTable("phase", 64),
    }
  );
  return { classical, quantum };
}
