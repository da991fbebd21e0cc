import { describe, expect, test } from "vitest";

import { DEFAULT_DIMS, forwardKinematics, terrainPolyline } from "../src/skeleton.js";
import { legAngles } from "./fixtures.js";

describe("forward kinematics", () => {
  test("zero pose hangs a straight vertical leg", () => {
    const chain = forwardKinematics([0, 1.0], legAngles(), DEFAULT_DIMS);
    expect(chain.hip).toEqual([0, 0.9]);
    expect(chain.knee[0]).toBeCloseTo(0, 12);
    expect(chain.knee[1]).toBeCloseTo(0.45, 12);
    expect(chain.ankle[1]).toBeCloseTo(0.0, 12);
    // flat sole pointing forward
    expect(chain.ball[0]).toBeCloseTo(0.15, 12);
    expect(chain.ball[1]).toBeCloseTo(0.0, 12);
    expect(chain.toe[0]).toBeCloseTo(0.22, 12);
  });

  test("hip flexion swings the knee forward", () => {
    const chain = forwardKinematics([0, 1.0], legAngles({ hip: Math.PI / 2 }), DEFAULT_DIMS);
    expect(chain.knee[0]).toBeCloseTo(0.45, 12);
    expect(chain.knee[1]).toBeCloseTo(0.9, 12);
  });

  test("knee flexion folds the shank backward", () => {
    const straight = forwardKinematics([0, 1.0], legAngles(), DEFAULT_DIMS);
    const bent = forwardKinematics([0, 1.0], legAngles({ knee: 0.8 }), DEFAULT_DIMS);
    expect(bent.ankle[0]).toBeLessThan(straight.ankle[0]);
    expect(bent.ankle[1]).toBeGreaterThan(straight.ankle[1]);
  });

  test("segment lengths are preserved", () => {
    const a = legAngles({ hip: 0.4, knee: 0.9, ankle: -0.2, ball: 0.3 });
    const chain = forwardKinematics([1.3, 1.1], a, DEFAULT_DIMS);
    const dist = (p: number[], q: number[]) => Math.hypot(p[0] - q[0], p[1] - q[1]);
    expect(dist(chain.hip, chain.knee)).toBeCloseTo(DEFAULT_DIMS.thigh, 12);
    expect(dist(chain.knee, chain.ankle)).toBeCloseTo(DEFAULT_DIMS.shank, 12);
    expect(dist(chain.ankle, chain.ball)).toBeCloseTo(DEFAULT_DIMS.heel_to_ball, 12);
    expect(dist(chain.ball, chain.toe)).toBeCloseTo(DEFAULT_DIMS.ball_to_toe, 12);
  });
});

describe("terrain polyline", () => {
  test("flat is a single segment at ground height", () => {
    expect(terrainPolyline({ kind: "flat" }, -1, 2)).toEqual([
      [-1, 0],
      [2, 0],
    ]);
  });

  test("stairs step up by one riser per tread", () => {
    const pts = terrainPolyline({ kind: "stairs", riser: 0.17, tread: 0.28 }, 0, 0.6);
    const heights = [...new Set(pts.map((p) => p[1]))];
    expect(heights.length).toBeGreaterThanOrEqual(3);
    for (let i = 1; i < heights.length; i++) {
      expect(heights[i] - heights[i - 1]).toBeCloseTo(0.17, 12);
    }
    // vertical riser faces: consecutive points sharing x
    const verticals = pts.filter((p, i) => i > 0 && pts[i - 1][0] === p[0]);
    expect(verticals.length).toBeGreaterThanOrEqual(2);
  });

  test("incline follows its slope", () => {
    const pts = terrainPolyline({ kind: "incline", angle: 0.15 }, 0, 2);
    expect(pts[1][1]).toBeCloseTo(2 * Math.tan(0.15), 12);
  });
});
