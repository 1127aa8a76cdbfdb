/**
 * Figure assembly: turns pairs of run directories into the four
 * publication layouts.
 *
 *   1  undriven oscillator, six panels: heatmaps of the classical and
 *      quantum phase-space densities plus their radial profiles, for a
 *      small and a large two-phonon rate
 *   2  driven oscillator, same layout with phase marginals as the cuts
 *   3  two coupled oscillators, phase-difference overlays at two rates
 *   4  all-to-all synchronization: steady-state branches and the
 *      boundary of the synchronized phase
 *
 * Overlays always draw the classical curve black and dashed and the
 * quantum curve red and solid.  A figure renders only if the two runs
 * underneath an overlay agree on their physical rates; protocol
 * settings like seeds and grid sizes are free to differ.
 */
import { writeFile } from "node:fs/promises";

import {
  Run,
  SchemaError,
  Table,
  assertSamePhysics,
  numericColumn,
  physicalParameters,
  readRun,
  readTable,
  stringColumn,
} from "./table.js";
import {
  NumberGrid,
  Series,
  documentSize,
  fmt,
  heatPanel,
  linePanel,
  panelGrid,
  svgDocument,
} from "./svg.js";

export interface RunPair {
  classical: string;
  quantum: string;
}

export interface FigureSpec {
  /** 1 to 4, selecting the layout above */
  figure: number;
  /** figures 1 to 3: one (classical, quantum) pair per panel column */
  pairs?: RunPair[];
  /** figure 4: run directory holding the mean-field branch scan */
  branches?: string;
  /** figure 4: run directory holding the boundary sweep */
  boundary?: string;
  /** figure 4, optional: a classical branch scan to overlay */
  classicalBranches?: string;
}

const CLASSICAL = { color: "#000000", dash: "6 4" };
const QUANTUM = { color: "#d62728" };
const LETTERS = "abcdef";

/** Rebuild the 2d grid from the flattened wigner table layout. */
export function gridFromWigner(table: Table): NumberGrid {
  const re = numericColumn(table, "re_alpha");
  const im = numericColumn(table, "im_alpha");
  const w = numericColumn(table, "w");
  const n = w.length;
  let nIm = 0;
  while (nIm < n && re[nIm] === re[0]) nIm++;
  if (nIm === 0 || n % nIm !== 0) {
    throw new SchemaError(`${table.source}: rows do not form a rectangular grid`);
  }
  const nRe = n / nIm;
  const xs: number[] = [];
  const ys = im.slice(0, nIm);
  const values: number[][] = [];
  for (let ix = 0; ix < nRe; ix++) {
    const base = ix * nIm;
    xs.push(re[base]!);
    for (let iy = 0; iy < nIm; iy++) {
      if (re[base + iy] !== re[base] || im[base + iy] !== ys[iy]) {
        throw new SchemaError(`${table.source}: grid axes are not repeated consistently`);
      }
    }
    values.push(w.slice(base, base + nIm));
  }
  return { xs, ys, values };
}

interface LoadedPair {
  classical: Run;
  quantum: Run;
  kappa2: number;
}

async function loadPair(pair: RunPair): Promise<LoadedPair> {
  const classical = await readRun(pair.classical);
  const quantum = await readRun(pair.quantum);
  assertSamePhysics(classical, quantum);
  return { classical, quantum, kappa2: physicalParameters(quantum).kappa2! };
}

function requirePairs(spec: FigureSpec, count: number): RunPair[] {
  if (!spec.pairs || spec.pairs.length !== count) {
    throw new SchemaError(
      `figure ${spec.figure} needs exactly ${count} classical/quantum run pairs, got ${spec.pairs?.length ?? 0}`
    );
  }
  return spec.pairs;
}

function overlay(
  classical: Table,
  quantum: Table,
  xColumn: string
): [Series, Series] {
  return [
    {
      label: "W_c",
      x: numericColumn(classical, xColumn),
      y: numericColumn(classical, "density"),
      ...CLASSICAL,
    },
    {
      label: "W_q",
      x: numericColumn(quantum, xColumn),
      y: numericColumn(quantum, "density"),
      ...QUANTUM,
    },
  ];
}

// --- figures 1 and 2: single-oscillator six-panel layouts ----------------------------

async function renderSingleOscillator(spec: FigureSpec, cut: "radial" | "phase"): Promise<string> {
  const pairs = requirePairs(spec, 2);
  const frames = panelGrid(3, 2);
  const parts: string[] = [];
  for (let row = 0; row < 2; row++) {
    const { classical, quantum, kappa2 } = await loadPair(pairs[row]!);
    const wc = gridFromWigner(await readTable(classical.dir, "wigner.csv", "wigner"));
    const wq = gridFromWigner(await readTable(quantum.dir, "wigner.csv", "wigner"));
    const cutC = await readTable(classical.dir, `${cut}.csv`, cut);
    const cutQ = await readTable(quantum.dir, `${cut}.csv`, cut);

    const letter = (k: number) => LETTERS[row * 3 + k];
    parts.push(
      heatPanel(frames[row * 3]!, {
        title: `(${letter(0)}) W_c, kappa2 = ${fmt(kappa2)}`,
        xLabel: "Re alpha",
        yLabel: "Im alpha",
        grid: wc,
      })
    );
    parts.push(
      heatPanel(frames[row * 3 + 1]!, {
        title: `(${letter(1)}) W_q`,
        xLabel: "Re alpha",
        yLabel: "Im alpha",
        grid: wq,
      })
    );
    const xColumn = cut === "radial" ? "radius" : "angle";
    parts.push(
      linePanel(frames[row * 3 + 2]!, {
        title: `(${letter(2)}) W_c vs W_q`,
        xLabel: cut === "radial" ? "|alpha|" : "phase",
        yLabel: "density",
        series: overlay(cutC, cutQ, xColumn),
        yFromZero: true,
      })
    );
  }
  const [width, height] = documentSize(3, 2);
  return svgDocument(width, height, parts.join("\n"));
}

// --- figure 3: coupled-pair phase difference ------------------------------------------

async function renderPhaseDifference(spec: FigureSpec): Promise<string> {
  const pairs = requirePairs(spec, 2);
  const frames = panelGrid(2, 1, 340, 250);
  const parts: string[] = [];
  for (let col = 0; col < 2; col++) {
    const { classical, quantum, kappa2 } = await loadPair(pairs[col]!);
    const pdC = await readTable(classical.dir, "phase_diff.csv", "phase_diff");
    const pdQ = await readTable(quantum.dir, "phase_diff.csv", "phase_diff");
    parts.push(
      linePanel(frames[col]!, {
        title: `(${LETTERS[col]}) kappa2 = ${fmt(kappa2)}`,
        xLabel: "phase difference",
        yLabel: "density",
        series: overlay(pdC, pdQ, "angle"),
        yFromZero: true,
      })
    );
  }
  const [width, height] = documentSize(2, 1, 340, 250);
  return svgDocument(width, height, parts.join("\n"));
}

// --- figure 4: all-to-all phase diagram ------------------------------------------------

function branchSeries(table: Table, style: { color: string; dash?: string }, marker: Series["marker"], prefix = ""): Series[] {
  const v = numericColumn(table, "v");
  const r = numericColumn(table, "r");
  const branch = stringColumn(table, "branch");
  const names: string[] = [];
  for (const b of branch) if (!names.includes(b)) names.push(b);
  return names.map((name) => {
    const keep = branch.map((b, i) => i).filter((i) => branch[i] === name);
    return {
      label: prefix + name,
      x: keep.map((i) => v[i]!),
      y: keep.map((i) => r[i]!),
      color: style.color,
      dash: style.dash,
      marker: name === "unsynchronized" ? (marker === "circle" ? "open-circle" : marker) : marker,
    };
  });
}

async function renderPhaseDiagram(spec: FigureSpec): Promise<string> {
  if (!spec.branches || !spec.boundary) {
    throw new SchemaError("figure 4 needs a branches run directory and a boundary run directory");
  }
  const branchRun = await readRun(spec.branches);
  const branchTable = await readTable(branchRun.dir, "branches.csv", "branches");
  const kappa2 = physicalParameters(branchRun).kappa2!;

  const series: Series[] = branchSeries(branchTable, QUANTUM, "circle");
  if (spec.classicalBranches) {
    const classicalRun = await readRun(spec.classicalBranches);
    assertSamePhysics(branchRun, classicalRun);
    const table = await readTable(classicalRun.dir, "branches.csv", "branches");
    series.push(...branchSeries(table, CLASSICAL, "triangle", "classical "));
  }

  const boundaryRun = await readRun(spec.boundary);
  const boundaryTable = await readTable(boundaryRun.dir, "boundary.csv", "boundary");
  const model = stringColumn(boundaryTable, "model");
  const bk2 = numericColumn(boundaryTable, "kappa2");
  const vc = numericColumn(boundaryTable, "v_critical");
  const tol = numericColumn(boundaryTable, "tolerance");
  const censored = numericColumn(boundaryTable, "censored");

  const boundarySeries: Series[] = [];
  for (const [name, style, mk] of [
    ["classical", CLASSICAL, "triangle"],
    ["quantum", QUANTUM, "circle"],
  ] as const) {
    // censored points carry no finite critical coupling and are left out
    const keep = model
      .map((m, i) => i)
      .filter((i) => model[i] === name && censored[i] === 0 && Number.isFinite(vc[i]!));
    if (keep.length === 0) continue;
    boundarySeries.push({
      label: name,
      x: keep.map((i) => bk2[i]!),
      y: keep.map((i) => vc[i]!),
      yerr: keep.map((i) => tol[i]!),
      color: style.color,
      dash: "dash" in style ? style.dash : undefined,
      marker: mk,
    });
  }
  if (boundarySeries.length === 0) {
    throw new SchemaError(`${spec.boundary}: boundary table has no uncensored points to draw`);
  }

  const frames = panelGrid(2, 1, 340, 250);
  const allK2 = boundarySeries.flatMap((s) => s.x);
  const parts = [
    linePanel(frames[0]!, {
      title: `(a) steady states, kappa2 = ${fmt(kappa2)}`,
      xLabel: "V",
      yLabel: "r",
      series,
      yFromZero: true,
    }),
    linePanel(frames[1]!, {
      title: "(b) synchronization boundary",
      xLabel: "kappa2",
      yLabel: "V_c",
      series: boundarySeries,
      // the sweep spans decades of kappa2 whenever more than one scale is present
      xLog: Math.max(...allK2) / Math.min(...allK2) > 20,
      yFromZero: true,
    }),
  ];
  const [width, height] = documentSize(2, 1, 340, 250);
  return svgDocument(width, height, parts.join("\n"));
}

// --- entry points -----------------------------------------------------------------------

/** Render one figure to an SVG string; throws SchemaError on bad inputs. */
export async function renderFigure(spec: FigureSpec): Promise<string> {
  switch (spec.figure) {
    case 1:
      return renderSingleOscillator(spec, "radial");
    case 2:
      return renderSingleOscillator(spec, "phase");
    case 3:
      return renderPhaseDifference(spec);
    case 4:
      return renderPhaseDiagram(spec);
    default:
      throw new SchemaError(`figure must be 1, 2, 3, or 4, got ${spec.figure}`);
  }
}

/** Render and write; nothing is written unless the whole figure succeeded. */
export async function renderFigureToFile(spec: FigureSpec, outPath: string): Promise<void> {
  const svg = await renderFigure(spec);
  await writeFile(outPath, svg, "utf8");
}
