// GENERATED by scripts/gen-types.mjs from schema/wire-protocol.schema.json.
// Do not edit by hand; run `npm run gen`.

export const PROTOCOL_VERSION = 1 as const;

export type Point = [number, number];

export interface LegAngles {
  hip: number;
  knee: number;
  ankle: number;
  ball: number;
}

export interface Pose {
  root: Point;
  left: LegAngles;
  right: LegAngles;
}

export interface Terrain {
  kind: "flat" | "incline" | "stairs";
  angle?: number;
  riser?: number;
  tread?: number;
}

export interface Membership {
  name: string;
  shape: "tri" | "trap" | "lshoulder" | "rshoulder";
  points: number[];
}

export interface ControllerInput {
  name: string;
  lo: number;
  hi: number;
  unit: "deg" | "none";
  labels: Membership[];
}

export interface Controller {
  name: string;
  inputs: ControllerInput[];
  output: {
    name: string;
    singletons: Array<{
      name: string;
      value: number;
    }>;
  };
  rules: Array<{
    if: Array<{
      var: string;
      label: string;
    }>;
    then: {
      var: string;
      label: string;
    };
  }>;
}

export interface Binding {
  mode: "level" | "ascent";
  role: "hip_swing" | "knee_swing" | "ankle_swing" | "ball_swing" | "hip_stance" | "knee_stance" | "ankle_stance" | "ball_stance";
  controller: string;
  metrics: Array<"alpha" | "delta_scaled" | "sole_angle">;
}

export interface HelloMessage {
  type: "hello";
  protocol_version: 1;
  controllers_text: string;
  controllers: {
    controllers: Controller[];
    bindings: Binding[];
  };
  config: {
    step_length: number;
    dt: number;
    terrain: Terrain;
    dims: Record<string, unknown>;
    max_phase_duration?: number;
  };
}

export interface FrameMessage {
  type: "frame";
  frame_index: number;
  time: number;
  pose: Pose;
  joint_velocities: Record<string, number>;
  scaled_delta: number | null;
  events: Array<"step_completed" | "target_reached" | "clamped" | "watchdog_reset">;
  phase: "swing" | "double_support";
  swing_leg: "left" | "right";
  target: Point | null;
}

export interface PatchMessage {
  type: "patch";
  id?: unknown;
  changes: Array<{
    path: string;
    value: number;
  }>;
}

export interface PatchAckMessage {
  type: "patch_ack";
  id?: unknown;
  accepted: boolean;
  diagnostics: string[];
}

export interface CommandMessage {
  type: "command";
  name: "pause" | "resume" | "reset" | "set_terrain" | "set_step_length";
  args?: Record<string, unknown>;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type WireMessage = HelloMessage | FrameMessage | PatchMessage | PatchAckMessage | CommandMessage | ErrorMessage;
