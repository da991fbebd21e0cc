// Scrolling chart of joint angles (degrees) and the scaled hip progress.
// Pure function of the committed frame ring, so pausing the stream
// freezes it and toggling series never clears history.
import type { Canvas2DLike } from "./draw.js";
import type { FrameMessage, LegAngles } from "./protocol.js";

export const JOINT_COLORS: Record<string, string> = {
  left_hip: "#4a90d9",
  left_knee: "#7fb3e8",
  left_ankle: "#b3d2f2",
  left_ball: "#dde9f7",
  right_hip: "#d95f4a",
  right_knee: "#e8927f",
  right_ankle: "#f2c0b3",
  right_ball: "#f7e0dd",
};
export const DELTA_COLOR = "#e8c547";

const DEG = 180 / Math.PI;

export interface ChartOptions {
  width: number;
  height: number;
  windowSeconds: number;
  joints: string[];
  showDelta: boolean;
}

function jointValue(frame: FrameMessage, joint: string): number {
  const [leg, name] = joint.split("_") as ["left" | "right", keyof LegAngles];
  return frame.pose[leg][name];
}

export function renderChart(
  ctx: Canvas2DLike,
  opts: ChartOptions,
  frames: readonly FrameMessage[],
): void {
  ctx.globalAlpha = 1;
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, opts.width, opts.height);
  if (frames.length < 2) return;
  const tEnd = frames[frames.length - 1].time;
  const tStart = tEnd - opts.windowSeconds;
  const visible = frames.filter((f) => f.time >= tStart);
  if (visible.length < 2) return;

  let lo = -5;
  let hi = 5;
  for (const f of visible) {
    for (const joint of opts.joints) {
      const v = jointValue(f, joint) * DEG;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  const pad = 0.08 * (hi - lo);
  lo -= pad;
  hi += pad;

  const toX = (t: number) => ((t - tStart) / opts.windowSeconds) * opts.width;
  const toY = (v: number) => opts.height - ((v - lo) / (hi - lo)) * opts.height;

  // zero line
  ctx.strokeStyle = "#2c3440";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, toY(0));
  ctx.lineTo(opts.width, toY(0));
  ctx.stroke();

  for (const joint of opts.joints) {
    ctx.strokeStyle = JOINT_COLORS[joint] ?? "#ffffff";
    ctx.lineWidth = 1.4;
    ctx.beginPath();
    visible.forEach((f, i) => {
      const x = toX(f.time);
      const y = toY(jointValue(f, joint) * DEG);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }

  if (opts.showDelta) {
    // scaled progress on its own -1.2..1.2 band at the bottom quarter
    const band = opts.height / 4;
    const toYd = (v: number) => opts.height - ((v + 1.2) / 2.4) * band;
    ctx.strokeStyle = DELTA_COLOR;
    ctx.lineWidth = 1.2;
    ctx.beginPath();
    let started = false;
    for (const f of visible) {
      if (f.scaled_delta === null) {
        started = false;
        continue;
      }
      const x = toX(f.time);
      const y = toYd(f.scaled_delta);
      if (!started) {
        ctx.moveTo(x, y);
        started = true;
      } else {
        ctx.lineTo(x, y);
      }
    }
    ctx.stroke();
  }

  ctx.fillStyle = "#8899aa";
  ctx.font = "11px sans-serif";
  ctx.fillText(`${hi.toFixed(0)} deg`, 4, 12);
  ctx.fillText(`${lo.toFixed(0)} deg`, 4, opts.height - 4);
}
