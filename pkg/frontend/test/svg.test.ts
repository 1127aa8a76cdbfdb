import { describe, expect, it } from "vitest";

import { fmt, linePanel, logTicks, niceTicks, rampColor } from "../src/svg.js";

describe("fmt", () => {
  it("keeps tick labels short and stable", () => {
    expect(fmt(0)).toBe("0");
    expect(fmt(0.05)).toBe("0.05");
    expect(fmt(20)).toBe("20");
    expect(fmt(1 / 3)).toBe("0.3333");
    expect(fmt(Infinity)).toBe("inf");
  });
});

describe("niceTicks", () => {
  it("lands on round numbers covering the range", () => {
    const ticks = niceTicks(0, 10.3);
    expect(ticks[0]).toBe(0);
    expect(ticks).toContain(10);
    for (let i = 1; i < ticks.length; i++) {
      expect(ticks[i]! - ticks[i - 1]!).toBeCloseTo(ticks[1]! - ticks[0]!);
    }
  });

  it("handles a degenerate range", () => {
    expect(niceTicks(2, 2)).toEqual([2]);
  });
});

describe("logTicks", () => {
  it("uses decades when the span is wide", () => {
    expect(logTicks(0.005, 10)).toEqual([0.01, 0.1, 1, 10]);
  });

  it("falls back to the linear ladder on a narrow span", () => {
    const ticks = logTicks(0.5, 1.2);
    expect(ticks.length).toBeGreaterThan(1);
  });
});

describe("rampColor", () => {
  it("clamps and interpolates deterministically", () => {
    expect(rampColor(0)).toBe("rgb(255,255,204)");
    expect(rampColor(1)).toBe("rgb(128,0,38)");
    expect(rampColor(-5)).toBe(rampColor(0));
    expect(rampColor(0.5)).toBe(rampColor(0.5));
  });
});

describe("linePanel", () => {
  const frame = { x: 0, y: 0, w: 280, h: 235 };

  it("draws dashed and solid overlays with a legend", () => {
    const svg = linePanel(frame, {
      title: "t",
      xLabel: "x",
      yLabel: "y",
      series: [
        { label: "c", x: [0, 1, 2], y: [1, 2, 1], color: "#000", dash: "6 4" },
        { label: "q", x: [0, 1, 2], y: [1.2, 2.2, 1.2], color: "#d62728" },
      ],
    });
    expect(svg).toContain('stroke-dasharray="6 4"');
    expect(svg.match(/<polyline /g)!.length).toBeGreaterThanOrEqual(2);
    expect(svg).toContain(">c<");
    expect(svg).toContain(">q<");
  });

  it("skips non-finite points instead of emitting NaN coordinates", () => {
    const svg = linePanel(frame, {
      title: "t",
      xLabel: "x",
      yLabel: "y",
      series: [{ label: "s", x: [0, 1, 2], y: [1, Infinity, 2], color: "#000", marker: "circle" }],
    });
    expect(svg).not.toContain("NaN");
    expect(svg.match(/class="marker-circle"/g)!.length).toBe(2);
  });
});
