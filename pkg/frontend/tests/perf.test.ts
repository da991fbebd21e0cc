// Rendering liveness budget: a full default-scene draw (stick figure +
// terrain + six-series chart over a 10 s ring) must fit comfortably
// inside a 30 fps frame (33 ms). No real browser runs here, so the
// budget is asserted on the draw pipeline itself against a recording
// context; the DOM glue adds only event wiring on top of it.
import { describe, expect, test } from "vitest";

import { renderChart } from "../src/chart.js";
import { renderScene } from "../src/draw.js";
import { DEFAULT_DIMS } from "../src/skeleton.js";
import type { FrameMessage } from "../src/protocol.js";
import { frame, legAngles } from "./fixtures.js";
import { MockCtx } from "./mockctx.js";

function walkingRing(n: number): FrameMessage[] {
  return Array.from({ length: n }, (_, i) =>
    frame({
      frame_index: i,
      time: i / 60,
      scaled_delta: -1 + ((i % 60) / 60) * 2,
      pose: {
        root: [i / 120, 0.95 + 0.05 * Math.sin(i / 9)],
        left: legAngles({ hip: 0.34 * Math.sin(i / 9), knee: 0.1, ankle: -0.05 }),
        right: legAngles({ hip: -0.34 * Math.sin(i / 9), knee: 0.05, ankle: 0.05 }),
      },
    }),
  );
}

describe("render budget (30 fps target)", () => {
  test("full scene + chart redraw stays far under 33 ms", () => {
    const ring = walkingRing(600); // 10 s of 60 Hz frames
    const sceneOpts = {
      width: 1200,
      height: 600,
      dims: DEFAULT_DIMS,
      terrain: { kind: "stairs", riser: 0.17, tread: 0.28 } as const,
      dimmed: false,
    };
    const chartOpts = {
      width: 1200,
      height: 400,
      windowSeconds: 6,
      joints: ["left_hip", "left_knee", "left_ankle", "right_hip", "right_knee", "right_ankle"],
      showDelta: true,
    };
    // warm up
    for (let i = 0; i < 20; i++) {
      renderScene(new MockCtx(), sceneOpts, ring[ring.length - 1]);
      renderChart(new MockCtx(), chartOpts, ring);
    }
    const iterations = 120;
    const t0 = performance.now();
    for (let i = 0; i < iterations; i++) {
      renderScene(new MockCtx(), sceneOpts, ring[ring.length - 1]);
      renderChart(new MockCtx(), chartOpts, ring);
    }
    const perFrameMs = (performance.now() - t0) / iterations;
    expect(perFrameMs).toBeLessThan(10);
  });
});
