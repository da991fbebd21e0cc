// Sagittal-rig forward kinematics matching the simulation's conventions:
// x forward, y up; hip angle 0 hangs the thigh straight down, positive is
// flexion; knee folds the shank backward; ankle 0 holds the sole
// perpendicular to the shank; ball lifts the toes.
import type { LegAngles, Point, Terrain } from "./protocol.js";

export interface Dims {
  thigh: number;
  shank: number;
  heel_to_ball: number;
  ball_to_toe: number;
  pelvis_height_offset: number;
}

export const DEFAULT_DIMS: Dims = {
  thigh: 0.45,
  shank: 0.45,
  heel_to_ball: 0.15,
  ball_to_toe: 0.07,
  pelvis_height_offset: 0.1,
};

export function dimsFrom(raw: Record<string, unknown> | undefined): Dims {
  const d = (raw ?? {}) as Partial<Dims>;
  return { ...DEFAULT_DIMS, ...d };
}

export interface LegChain {
  hip: Point;
  knee: Point;
  ankle: Point;
  ball: Point;
  toe: Point;
}

export function forwardKinematics(root: Point, a: LegAngles, dims: Dims): LegChain {
  const hip: Point = [root[0], root[1] - dims.pelvis_height_offset];
  const knee: Point = [
    hip[0] + dims.thigh * Math.sin(a.hip),
    hip[1] - dims.thigh * Math.cos(a.hip),
  ];
  const shankDir = a.hip - a.knee;
  const ankle: Point = [
    knee[0] + dims.shank * Math.sin(shankDir),
    knee[1] - dims.shank * Math.cos(shankDir),
  ];
  const soleDir = shankDir + a.ankle;
  const ball: Point = [
    ankle[0] + dims.heel_to_ball * Math.cos(soleDir),
    ankle[1] + dims.heel_to_ball * Math.sin(soleDir),
  ];
  const toeDir = soleDir + a.ball;
  const toe: Point = [
    ball[0] + dims.ball_to_toe * Math.cos(toeDir),
    ball[1] + dims.ball_to_toe * Math.sin(toeDir),
  ];
  return { hip, knee, ankle, ball, toe };
}

/** Ground polyline across [xLo, xHi] for drawing behind the figure. */
export function terrainPolyline(terrain: Terrain, xLo: number, xHi: number): Point[] {
  if (terrain.kind === "incline") {
    const slope = Math.tan(terrain.angle ?? 0);
    return [
      [xLo, slope * xLo],
      [xHi, slope * xHi],
    ];
  }
  if (terrain.kind === "stairs") {
    const riser = terrain.riser ?? 0.17;
    const tread = terrain.tread ?? 0.28;
    const inset = 0.03; // heels land this far past each step nose
    const pts: Point[] = [];
    let j = Math.floor((xLo + inset) / tread);
    pts.push([xLo, j * riser]);
    while (j * tread - inset < xHi) {
      const noseX = (j + 1) * tread - inset;
      pts.push([noseX, j * riser]);
      pts.push([noseX, (j + 1) * riser]);
      j += 1;
    }
    pts.push([xHi, j * riser]);
    return pts;
  }
  return [
    [xLo, 0],
    [xHi, 0],
  ];
}
