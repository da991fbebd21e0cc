// Stick-figure scene rendering. Works against a minimal 2D-context
// surface so tests can replay draw commands without a browser.
import type { FrameMessage, Terrain } from "./protocol.js";
import { Dims, forwardKinematics, terrainPolyline } from "./skeleton.js";

export interface Canvas2DLike {
  lineWidth: number;
  strokeStyle: CanvasRenderingContext2D["strokeStyle"];
  fillStyle: CanvasRenderingContext2D["fillStyle"];
  globalAlpha: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface SceneOptions {
  width: number;
  height: number;
  dims: Dims;
  terrain: Terrain;
  dimmed: boolean; // true once the connection dropped
  banner?: string;
}

const LEG_COLORS = { left: "#4a90d9", right: "#d95f4a" } as const;
const SCALE = 160; // pixels per meter
const GROUND_MARGIN = 40;

export function worldToCanvas(
  opts: SceneOptions,
  cameraX: number,
  p: readonly [number, number],
): [number, number] {
  const x = opts.width / 2 + (p[0] - cameraX) * SCALE;
  const y = opts.height - GROUND_MARGIN - p[1] * SCALE;
  return [x, y];
}

export function renderScene(
  ctx: Canvas2DLike,
  opts: SceneOptions,
  frame: FrameMessage | null,
): void {
  ctx.globalAlpha = 1;
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, opts.width, opts.height);
  if (!frame) {
    ctx.fillStyle = "#8899aa";
    ctx.font = "14px sans-serif";
    ctx.fillText("waiting for frames...", 16, 24);
    return;
  }
  const cameraX = frame.pose.root[0];
  const cameraY = frame.pose.root[1];
  const groundShift = Math.max(0, (cameraY - 1.2) * SCALE);
  const shifted = {
    ...opts,
    height: opts.height + groundShift,
  };

  if (opts.dimmed) ctx.globalAlpha = 0.35;

  // terrain
  const span = opts.width / SCALE;
  const polyline = terrainPolyline(opts.terrain, cameraX - span, cameraX + span);
  ctx.strokeStyle = "#5d6b7a";
  ctx.lineWidth = 2;
  ctx.beginPath();
  polyline.forEach((p, i) => {
    const [x, y] = worldToCanvas(shifted, cameraX, p);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();

  // target marker
  if (frame.target) {
    const [tx, ty] = worldToCanvas(shifted, cameraX, frame.target);
    ctx.strokeStyle = "#e8c547";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(tx - 6, ty - 6);
    ctx.lineTo(tx + 6, ty + 6);
    ctx.moveTo(tx - 6, ty + 6);
    ctx.lineTo(tx + 6, ty - 6);
    ctx.stroke();
  }

  // legs: stance drawn behind the swing leg
  const order: Array<"left" | "right"> =
    frame.swing_leg === "left" ? ["right", "left"] : ["left", "right"];
  for (const leg of order) {
    const chain = forwardKinematics(frame.pose.root, frame.pose[leg], opts.dims);
    const pts = [chain.hip, chain.knee, chain.ankle, chain.ball, chain.toe];
    ctx.strokeStyle = LEG_COLORS[leg];
    ctx.lineWidth = leg === frame.swing_leg ? 3 : 2;
    ctx.beginPath();
    pts.forEach((p, i) => {
      const [x, y] = worldToCanvas(shifted, cameraX, p);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    for (const p of pts) {
      const [x, y] = worldToCanvas(shifted, cameraX, p);
      ctx.fillStyle = LEG_COLORS[leg];
      ctx.beginPath();
      ctx.arc(x, y, 2.5, 0, Math.PI * 2);
      ctx.fill();
    }
  }

  // torso stub above the root
  const [rx, ry] = worldToCanvas(shifted, cameraX, frame.pose.root);
  ctx.strokeStyle = "#c9d4e0";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(rx, ry);
  ctx.lineTo(rx, ry - 0.35 * SCALE);
  ctx.stroke();
  ctx.beginPath();
  ctx.arc(rx, ry - 0.42 * SCALE, 0.07 * SCALE, 0, Math.PI * 2);
  ctx.stroke();

  ctx.globalAlpha = 1;
  if (opts.dimmed) {
    ctx.fillStyle = "#ffb347";
    ctx.font = "bold 14px sans-serif";
    ctx.fillText(opts.banner ?? "disconnected - showing last frame", 16, 24);
  }
}
