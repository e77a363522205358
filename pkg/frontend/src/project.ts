/** Pinhole projection mirroring the engine's camera conventions. */

import type { CameraState } from "./protocol.js";

export type Vec3 = [number, number, number];

/** Rotation matrix (row-major 3x3) for a unit quaternion (w, x, y, z). */
export function quatToMatrix(q: [number, number, number, number]): number[] {
  const [w, x, y, z] = q;
  return [
    1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
    2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
    2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y),
  ];
}

/** World point -> screen pixels, or null when behind the camera. */
export function projectToScreen(camera: CameraState, p: Vec3): [number, number] | null {
  const m = quatToMatrix(camera.quat);
  const dx = p[0] - camera.pos[0];
  const dy = p[1] - camera.pos[1];
  const dz = p[2] - camera.pos[2];
  // camera frame = R^T (p - pos); R columns are the camera axes
  const cx = m[0] * dx + m[3] * dy + m[6] * dz;
  const cy = m[1] * dx + m[4] * dy + m[7] * dz;
  const cz = m[2] * dx + m[5] * dy + m[8] * dz;
  if (cz <= 0) {
    return null;
  }
  return [camera.fx * cx / cz + camera.cx, camera.fy * cy / cz + camera.cy];
}

export interface PlaneDef {
  origin: Vec3;
  normal: Vec3;
  basisU: Vec3;
  basisV: Vec3;
}

/** Plane chart coordinates (meters along basisU/basisV) -> world. */
export function planeToWorld(plane: PlaneDef, a: number, b: number): Vec3 {
  return [
    plane.origin[0] + a * plane.basisU[0] + b * plane.basisV[0],
    plane.origin[1] + a * plane.basisU[1] + b * plane.basisV[1],
    plane.origin[2] + a * plane.basisU[2] + b * plane.basisV[2],
  ];
}
