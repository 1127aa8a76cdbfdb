/**
 * Hand-rolled SVG building blocks: scales, axes, heatmap cells, line
 * series with markers.  Everything is a pure function from numbers to
 * strings, so a figure rendered twice from the same tables is
 * byte-identical; nothing here reads the clock or an RNG.
 */

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  /** stroke-dasharray, e.g. "6 4"; omit for a solid line */
  dash?: string;
  marker?: "circle" | "triangle" | "open-circle" | "none";
  line?: boolean;
  /** symmetric vertical whiskers, one per point */
  yerr?: number[];
}

export interface LinePanelOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  xLog?: boolean;
  yFromZero?: boolean;
  legend?: boolean;
}

export interface NumberGrid {
  xs: number[];
  ys: number[];
  /** values[ix][iy] */
  values: number[][];
}

export interface HeatPanelOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  grid: NumberGrid;
}

/** Stable short decimal for tick and title text. */
export function fmt(x: number): string {
  if (!Number.isFinite(x)) return x > 0 ? "inf" : x < 0 ? "-inf" : "nan";
  if (x === 0) return "0";
  return String(parseFloat(x.toPrecision(4)));
}

/** Pixel coordinate rounded to a fixed 1/100 grid. */
function px(v: number): string {
  const r = Math.round(v * 100) / 100;
  return r === 0 ? "0" : String(r);
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

// --- scales and ticks -----------------------------------------------------------

export type Scale = (value: number) => number;

export function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const span = hi - lo || 1;
  return (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo);
}

export function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const a = Math.log10(lo);
  const span = Math.log10(hi) - a || 1;
  return (v) => pxLo + ((Math.log10(v) - a) / span) * (pxHi - pxLo);
}

/** Round tick positions covering [lo, hi], the usual 1/2/5 ladder. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = mag * (norm >= 7.5 ? 10 : norm >= 3.5 ? 5 : norm >= 1.5 ? 2 : 1);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    // kill float dust so labels stay short
    ticks.push(parseFloat(t.toPrecision(12)));
  }
  return ticks;
}

/** Decade ticks for log axes; falls back to the linear ladder when the span is narrow. */
export function logTicks(lo: number, hi: number): number[] {
  const first = Math.ceil(Math.log10(lo) - 1e-9);
  const last = Math.floor(Math.log10(hi) + 1e-9);
  const decades: number[] = [];
  for (let k = first; k <= last; k++) decades.push(Math.pow(10, k));
  return decades.length >= 2 ? decades : niceTicks(lo, hi, 4);
}

function dataRange(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [lo, hi];
}

// --- color ramp -------------------------------------------------------------------

// light-to-dark sequential ramp (ColorBrewer YlOrRd stops)
const RAMP = ["#ffffcc", "#fed976", "#fd8d3c", "#e31a1c", "#800026"];

function hexToRgb(hex: string): [number, number, number] {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

/** Map t in [0, 1] onto the ramp; out-of-range values clamp. */
export function rampColor(t: number): string {
  const u = Math.min(1, Math.max(0, Number.isFinite(t) ? t : 0)) * (RAMP.length - 1);
  const i = Math.min(RAMP.length - 2, Math.floor(u));
  const f = u - i;
  const a = hexToRgb(RAMP[i]!);
  const b = hexToRgb(RAMP[i + 1]!);
  const mix = a.map((c, k) => Math.round(c + (b[k]! - c) * f));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}

// --- low-level elements -------------------------------------------------------------

export function textEl(
  x: number,
  y: number,
  s: string,
  opts: { size?: number; anchor?: string; rotate?: boolean; fill?: string } = {}
): string {
  const size = opts.size ?? 11;
  const anchor = opts.anchor ?? "middle";
  const fill = opts.fill ?? "#222";
  const transform = opts.rotate ? ` transform="rotate(-90 ${px(x)} ${px(y)})"` : "";
  return `<text x="${px(x)}" y="${px(y)}" font-size="${size}" text-anchor="${anchor}" fill="${fill}"${transform}>${escapeText(s)}</text>`;
}

function polyline(points: Array<[number, number]>, color: string, dash?: string): string {
  const pts = points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.4"${dashAttr}/>`;
}

function marker(kind: string, x: number, y: number, color: string): string {
  if (kind === "triangle") {
    const s = 3.6;
    return `<path class="marker-triangle" d="M${px(x)},${px(y - s)} L${px(x - s)},${px(y + s)} L${px(x + s)},${px(y + s)} Z" fill="${color}"/>`;
  }
  if (kind === "open-circle") {
    return `<circle class="marker-circle" cx="${px(x)}" cy="${px(y)}" r="2.8" fill="#fff" stroke="${color}" stroke-width="1.2"/>`;
  }
  return `<circle class="marker-circle" cx="${px(x)}" cy="${px(y)}" r="2.8" fill="${color}"/>`;
}

// --- axes ----------------------------------------------------------------------------

function bottomAxis(plot: Rect, scale: Scale, ticks: number[], label: string): string {
  const parts: string[] = [];
  const y = plot.y + plot.h;
  parts.push(`<line x1="${px(plot.x)}" y1="${px(y)}" x2="${px(plot.x + plot.w)}" y2="${px(y)}" stroke="#444"/>`);
  for (const t of ticks) {
    const x = scale(t);
    if (x < plot.x - 0.5 || x > plot.x + plot.w + 0.5) continue;
    parts.push(`<line x1="${px(x)}" y1="${px(y)}" x2="${px(x)}" y2="${px(y + 4)}" stroke="#444"/>`);
    parts.push(textEl(x, y + 15, fmt(t), { size: 10 }));
  }
  parts.push(textEl(plot.x + plot.w / 2, y + 29, label));
  return parts.join("");
}

function leftAxis(plot: Rect, scale: Scale, ticks: number[], label: string): string {
  const parts: string[] = [];
  parts.push(`<line x1="${px(plot.x)}" y1="${px(plot.y)}" x2="${px(plot.x)}" y2="${px(plot.y + plot.h)}" stroke="#444"/>`);
  for (const t of ticks) {
    const y = scale(t);
    if (y < plot.y - 0.5 || y > plot.y + plot.h + 0.5) continue;
    parts.push(`<line x1="${px(plot.x - 4)}" y1="${px(y)}" x2="${px(plot.x)}" y2="${px(y)}" stroke="#444"/>`);
    parts.push(textEl(plot.x - 6, y + 3.5, fmt(t), { size: 10, anchor: "end" }));
  }
  parts.push(textEl(plot.x - 40, plot.y + plot.h / 2, label, { rotate: true }));
  return parts.join("");
}

// --- panels ------------------------------------------------------------------------

const MARGIN = { left: 52, right: 14, top: 24, bottom: 40 };

function plotArea(frame: Rect, rightExtra = 0): Rect {
  return {
    x: frame.x + MARGIN.left,
    y: frame.y + MARGIN.top,
    w: frame.w - MARGIN.left - MARGIN.right - rightExtra,
    h: frame.h - MARGIN.top - MARGIN.bottom,
  };
}

/** Overlaid line/scatter series with axes, title, and optional legend. */
export function linePanel(frame: Rect, opts: LinePanelOpts): string {
  const plot = plotArea(frame);
  const xsAll = opts.series.flatMap((s) => s.x).filter((v) => Number.isFinite(v));
  const ysAll = opts.series.flatMap((s, _i) =>
    s.y.flatMap((v, k) => {
      const e = s.yerr?.[k] ?? 0;
      return [v - e, v + e];
    })
  );
  let [xLo, xHi] = dataRange(xsAll);
  let [yLo, yHi] = dataRange(ysAll);
  if (opts.yFromZero && yLo > 0) yLo = 0;
  const yPad = 0.06 * (yHi - yLo);
  yHi += yPad;
  if (!opts.yFromZero) yLo -= yPad;

  const xScale = opts.xLog ? logScale(xLo, xHi, plot.x, plot.x + plot.w) : linearScale(xLo, xHi, plot.x, plot.x + plot.w);
  const yScale = linearScale(yLo, yHi, plot.y + plot.h, plot.y);
  const xTicks = opts.xLog ? logTicks(xLo, xHi) : niceTicks(xLo, xHi);
  const yTicks = niceTicks(yLo, yHi);

  const parts: string[] = [`<g class="panel">`];
  parts.push(`<rect x="${px(plot.x)}" y="${px(plot.y)}" width="${px(plot.w)}" height="${px(plot.h)}" fill="#fcfcfc" stroke="#ddd"/>`);
  parts.push(bottomAxis(plot, xScale, xTicks, opts.xLabel));
  parts.push(leftAxis(plot, yScale, yTicks, opts.yLabel));
  parts.push(textEl(frame.x + frame.w / 2, frame.y + 14, opts.title, { size: 12 }));

  for (const s of opts.series) {
    const pts: Array<[number, number]> = [];
    for (let i = 0; i < s.x.length; i++) {
      const x = s.x[i]!;
      const y = s.y[i]!;
      if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
      pts.push([xScale(x), yScale(y)]);
    }
    if (s.yerr) {
      for (let i = 0; i < s.x.length; i++) {
        const e = s.yerr[i] ?? 0;
        const x = s.x[i]!;
        const y = s.y[i]!;
        if (!(e > 0) || !Number.isFinite(x) || !Number.isFinite(y)) continue;
        const cx = xScale(x);
        parts.push(
          `<line x1="${px(cx)}" y1="${px(yScale(y - e))}" x2="${px(cx)}" y2="${px(yScale(y + e))}" stroke="${s.color}" stroke-width="1"/>`
        );
      }
    }
    if (s.line !== false && pts.length > 1) parts.push(polyline(pts, s.color, s.dash));
    if (s.marker && s.marker !== "none") {
      for (const [x, y] of pts) parts.push(marker(s.marker, x, y, s.color));
    }
  }

  if (opts.legend !== false && opts.series.length > 1) {
    let ly = plot.y + 12;
    for (const s of opts.series) {
      const lx = plot.x + plot.w - 78;
      const dashAttr = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
      parts.push(`<line x1="${px(lx)}" y1="${px(ly - 3)}" x2="${px(lx + 20)}" y2="${px(ly - 3)}" stroke="${s.color}" stroke-width="1.4"${dashAttr}/>`);
      if (s.marker && s.marker !== "none") parts.push(marker(s.marker, lx + 10, ly - 3, s.color));
      parts.push(textEl(lx + 25, ly, s.label, { size: 10, anchor: "start" }));
      ly += 14;
    }
  }
  parts.push(`</g>`);
  return parts.join("\n");
}

/** Heatmap with axes and a compact colorbar on the right. */
export function heatPanel(frame: Rect, opts: HeatPanelOpts): string {
  const barWidth = 26;
  const plot = plotArea(frame, barWidth);
  const { xs, ys, values } = opts.grid;

  let vLo = Infinity;
  let vHi = -Infinity;
  for (const col of values) {
    for (const v of col) {
      if (!Number.isFinite(v)) continue;
      if (v < vLo) vLo = v;
      if (v > vHi) vHi = v;
    }
  }
  if (!(vHi > vLo)) {
    vLo = 0;
    vHi = 1;
  }
  vLo = Math.min(0, vLo); // densities start at zero even if every cell is filled

  const [xLo, xHi] = dataRange(xs);
  const [yLo, yHi] = dataRange(ys);
  const xScale = linearScale(xLo, xHi, plot.x, plot.x + plot.w);
  const yScale = linearScale(yLo, yHi, plot.y + plot.h, plot.y);

  const parts: string[] = [`<g class="panel">`];
  // cell edges sit halfway between grid points; 0.4px bleed hides hairlines
  const cellW = plot.w / Math.max(1, xs.length - 1);
  const cellH = plot.h / Math.max(1, ys.length - 1);
  for (let ix = 0; ix < xs.length; ix++) {
    const col = values[ix]!;
    for (let iy = 0; iy < ys.length; iy++) {
      const t = (col[iy]! - vLo) / (vHi - vLo);
      const cx = xScale(xs[ix]!);
      const cy = yScale(ys[iy]!);
      parts.push(
        `<rect class="cell" x="${px(cx - cellW / 2)}" y="${px(cy - cellH / 2)}" width="${px(cellW + 0.4)}" height="${px(cellH + 0.4)}" fill="${rampColor(t)}"/>`
      );
    }
  }
  parts.push(`<rect x="${px(plot.x)}" y="${px(plot.y)}" width="${px(plot.w)}" height="${px(plot.h)}" fill="none" stroke="#444"/>`);
  parts.push(bottomAxis(plot, xScale, niceTicks(xLo, xHi, 4), opts.xLabel));
  parts.push(leftAxis(plot, yScale, niceTicks(yLo, yHi, 4), opts.yLabel));
  parts.push(textEl(frame.x + frame.w / 2, frame.y + 14, opts.title, { size: 12 }));

  // colorbar
  const bx = plot.x + plot.w + 8;
  const steps = 32;
  for (let k = 0; k < steps; k++) {
    const t0 = k / steps;
    const y = plot.y + plot.h * (1 - (k + 1) / steps);
    parts.push(
      `<rect x="${px(bx)}" y="${px(y)}" width="8" height="${px(plot.h / steps + 0.4)}" fill="${rampColor(t0 + 0.5 / steps)}"/>`
    );
  }
  parts.push(`<rect x="${px(bx)}" y="${px(plot.y)}" width="8" height="${px(plot.h)}" fill="none" stroke="#444" stroke-width="0.6"/>`);
  parts.push(textEl(bx + 4, plot.y - 4, fmt(vHi), { size: 8 }));
  parts.push(textEl(bx + 4, plot.y + plot.h + 10, fmt(vLo), { size: 8 }));
  parts.push(`</g>`);
  return parts.join("\n");
}

// --- document ---------------------------------------------------------------------

/** Row-major grid of equally sized panel frames. */
export function panelGrid(cols: number, rows: number, cellW = 280, cellH = 235, pad = 8): Rect[] {
  const frames: Rect[] = [];
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      frames.push({ x: pad + c * cellW, y: pad + r * cellH, w: cellW, h: cellH });
    }
  }
  return frames;
}

export function documentSize(cols: number, rows: number, cellW = 280, cellH = 235, pad = 8): [number, number] {
  return [2 * pad + cols * cellW, 2 * pad + rows * cellH];
}

export function svgDocument(width: number, height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="#ffffff"/>`,
    body,
    `</svg>`,
    ``,
  ].join("\n");
}
