/** Small vector/quaternion helpers (scalar-first quaternions). */

import type { Quat, Vec2, Vec3 } from "./types.js";

export function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function scale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

export function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

export function norm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

export function normalize(a: Vec3): Vec3 {
  const n = norm(a);
  if (n === 0) {
    throw new Error("cannot normalize the zero vector");
  }
  return scale(a, 1 / n);
}

export function quatNormalize(q: Quat): Quat {
  const n = Math.hypot(q[0], q[1], q[2], q[3]);
  if (n === 0) {
    throw new Error("cannot normalize the zero quaternion");
  }
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

/** Rotate a vector by a (normalized) scalar-first quaternion. */
export function quatRotate(q: Quat, v: Vec3): Vec3 {
  const [w, x, y, z] = quatNormalize(q);
  // v + 2 * u x (u x v + w v), with u = (x, y, z)
  const u: Vec3 = [x, y, z];
  const t = cross(u, add(cross(u, v), scale(v, w)));
  return add(v, scale(t, 2));
}

export function quatFromAxisAngle(axis: Vec3, angle: number): Quat {
  const a = normalize(axis);
  const s = Math.sin(angle / 2);
  return [Math.cos(angle / 2), a[0] * s, a[1] * s, a[2] * s];
}

export function quatMultiply(a: Quat, b: Quat): Quat {
  return [
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
    a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
    a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
    a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
  ];
}

/** Orthonormal in-plane axes (u, v) of a plane pose's local x/y. */
export function planeBasis(orientation: Quat): { u: Vec3; v: Vec3; n: Vec3 } {
  return {
    u: quatRotate(orientation, [1, 0, 0]),
    v: quatRotate(orientation, [0, 1, 0]),
    n: quatRotate(orientation, [0, 0, 1]),
  };
}

export function asVec3(a: number[]): Vec3 {
  if (a.length !== 3) {
    throw new Error(`expected 3 components, got ${a.length}`);
  }
  return [a[0]!, a[1]!, a[2]!];
}

export function asQuat(a: number[]): Quat {
  if (a.length !== 4) {
    throw new Error(`expected 4 components, got ${a.length}`);
  }
  return [a[0]!, a[1]!, a[2]!, a[3]!];
}

export function asVec2(a: number[]): Vec2 {
  if (a.length !== 2) {
    throw new Error(`expected 2 components, got ${a.length}`);
  }
  return [a[0]!, a[1]!];
}
