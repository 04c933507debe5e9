import { describe, expect, it } from "vitest";

import { crystalPose } from "../src/schematic.js";

describe("crystalPose", () => {
  it("reference pose at position 0", () => {
    const pose = crystalPose(0, 5.5);
    expect(pose.fraction).toBe(0);
    expect(pose.upperOffset).toBe(0);
    expect(pose.lowerOffset).toBeCloseTo(0, 12);
  });

  it("maximal opposite offsets at full travel", () => {
    const pose = crystalPose(5.5, 5.5);
    expect(pose.fraction).toBe(1);
    expect(pose.upperOffset).toBe(1);
    expect(pose.lowerOffset).toBe(-1);
  });

  it("crystals always move against each other", () => {
    for (const s of [0.5, 1.7, 3.2, 4.9]) {
      const pose = crystalPose(s, 5.5);
      expect(pose.upperOffset).toBeCloseTo(-pose.lowerOffset, 12);
      expect(pose.upperOffset).toBeCloseTo(s / 5.5, 12);
    }
  });

  it("clamps out-of-range positions to the end stops", () => {
    expect(crystalPose(-1, 5.5).fraction).toBe(0);
    expect(crystalPose(9, 5.5).fraction).toBe(1);
  });
});
