import { describe, expect, it } from "vitest";

import { estimateOscillations } from "../src/oscillations.js";

const LOSC_UM = 633e-3 / 0.057; // 11.105 um

function narrowLineScan(points = 600): { x: number[]; y: number[] } {
  // closed-form appearance channel over the full 38.4 um travel at theta=45,
  // including the 10 mm base-thickness phase offset the real scans carry
  const x: number[] = [];
  const y: number[] = [];
  for (let k = 0; k < points; k++) {
    const dl = (38.4 * k) / (points - 1);
    const full = 10e3 + dl;
    x.push(dl);
    y.push(Math.sin((Math.PI * full) / LOSC_UM) ** 2);
  }
  return { x, y };
}

describe("estimateOscillations", () => {
  it("sees ~3.5 oscillations in a full-travel narrow-line scan", () => {
    const { x, y } = narrowLineScan();
    const est = estimateOscillations(x, y);
    expect(est).not.toBeNull();
    expect(est!.periods).toBeGreaterThan(3.2);
    expect(est!.periods).toBeLessThan(3.7);
    expect(est!.periodUm).toBeCloseTo(11.105, 1);
  });

  it("returns null for a flat trace", () => {
    const x = Array.from({ length: 100 }, (_, k) => k * 0.1);
    const y = x.map(() => 0.0);
    expect(estimateOscillations(x, y)).toBeNull();
  });

  it("returns null for too few points", () => {
    expect(estimateOscillations([0, 1], [0, 1])).toBeNull();
  });

  it("survives noise", () => {
    const { x, y } = narrowLineScan(400);
    let seed = 1;
    const rand = () => {
      // deterministic LCG so the test cannot flake
      seed = (seed * 1664525 + 1013904223) % 4294967296;
      return seed / 4294967296 - 0.5;
    };
    const noisy = y.map((v) => v + 0.02 * rand());
    const est = estimateOscillations(x, noisy);
    expect(est).not.toBeNull();
    expect(est!.periods).toBeGreaterThan(3.0);
    expect(est!.periods).toBeLessThan(4.0);
  });
});
