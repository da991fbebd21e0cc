import type { FrameMessage, HelloMessage, LegAngles } from "../src/protocol.js";

export function legAngles(partial: Partial<LegAngles> = {}): LegAngles {
  return { hip: 0, knee: 0, ankle: 0, ball: 0, ...partial };
}

export function frame(partial: Partial<FrameMessage> = {}): FrameMessage {
  return {
    type: "frame",
    frame_index: 0,
    time: 0,
    pose: { root: [0, 1.0], left: legAngles(), right: legAngles() },
    joint_velocities: {},
    scaled_delta: null,
    events: [],
    phase: "swing",
    swing_leg: "left",
    target: [0.6, 0],
    ...partial,
  };
}

export function hello(partial: Partial<HelloMessage> = {}): HelloMessage {
  return {
    type: "hello",
    protocol_version: 1,
    controllers_text: "# none",
    controllers: {
      controllers: [
        {
          name: "hip_swing",
          inputs: [
            {
              name: "delta",
              lo: -1.2,
              hi: 1.2,
              unit: "none",
              labels: [
                { name: "start", shape: "lshoulder", points: [-1, -0.5] },
                { name: "center", shape: "tri", points: [-1, 0, 1] },
                { name: "end", shape: "rshoulder", points: [0.5, 1] },
              ],
            },
          ],
          output: {
            name: "velocity",
            singletons: [
              { name: "slow", value: 0.2 },
              { name: "fast", value: 2.5 },
              { name: "stay", value: 0 },
            ],
          },
          rules: [
            { if: [{ var: "delta", label: "start" }], then: { var: "velocity", label: "slow" } },
            { if: [{ var: "delta", label: "center" }], then: { var: "velocity", label: "fast" } },
            { if: [{ var: "delta", label: "end" }], then: { var: "velocity", label: "stay" } },
          ],
        },
      ],
      bindings: [
        { mode: "level", role: "hip_swing", controller: "hip_swing", metrics: ["delta_scaled"] },
      ],
    },
    config: {
      step_length: 0.6,
      dt: 1 / 120,
      terrain: { kind: "flat" },
      dims: {},
    },
    ...partial,
  };
}
