import { describe, expect, it } from "vitest";

import { classifyClick, dist, pointInPolygon } from "../src/legal.js";
import type { Vec2 } from "../src/types.js";

const square: Vec2[] = [[0, 0], [10, 0], [10, 10], [0, 10]];
const block: Vec2[] = [[4, 4], [6, 4], [6, 6], [4, 6]];
const ctx = { evader: [2, 8] as Vec2, outer: square, obstacles: [block] };

describe("pointInPolygon", () => {
  it("classifies interior, exterior, and boundary points", () => {
    expect(pointInPolygon([5, 5], square)).toBe(true);
    expect(pointInPolygon([11, 5], square)).toBe(false);
    expect(pointInPolygon([10, 5], square)).toBe(true);
    expect(pointInPolygon([0, 0], square)).toBe(true);
  });

  it("handles a concave ring", () => {
    const comb: Vec2[] = [[0, 0], [6, 0], [6, 4], [4, 4], [4, 1], [2, 1], [2, 4], [0, 4]];
    expect(pointInPolygon([3, 3], comb)).toBe(false);
    expect(pointInPolygon([1, 3], comb)).toBe(true);
    expect(pointInPolygon([5, 3], comb)).toBe(true);
  });
});

describe("classifyClick", () => {
  it("submits a click inside the unit disk unchanged", () => {
    const v = classifyClick(ctx, [2.5, 8.6]);
    expect(v.kind).toBe("submit");
    if (v.kind === "submit") expect(v.target).toEqual([2.5, 8.6]);
  });

  it("clamps a distance-1.4 click to the disk boundary toward it", () => {
    const v = classifyClick(ctx, [2 + 1.4, 8]);
    expect(v.kind).toBe("clamped");
    if (v.kind === "clamped") {
      expect(dist([2, 8], v.target)).toBeCloseTo(1, 12);
      expect(v.target[1]).toBeCloseTo(8, 12);
      expect(v.target[0]).toBeCloseTo(3, 12);
    }
  });

  it("rejects a click inside an obstacle locally", () => {
    const v = classifyClick(
      { ...ctx, evader: [4.5, 3.5] },
      [4.5, 4.4],
    );
    expect(v.kind).toBe("rejected");
    if (v.kind === "rejected") expect(v.reason).toContain("obstacle");
  });

  it("rejects a clamped target that lands outside the arena", () => {
    const v = classifyClick({ ...ctx, evader: [0.4, 8] }, [-5, 8]);
    expect(v.kind).toBe("rejected");
    if (v.kind === "rejected") expect(v.reason).toContain("arena");
  });

  it("lets placement clicks skip the disk rule", () => {
    const v = classifyClick({ ...ctx, evader: null }, [9, 1]);
    expect(v.kind).toBe("submit");
  });
});
