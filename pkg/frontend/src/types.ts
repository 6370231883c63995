/**
 * Wire types of the scaffold session service, validated with zod at the
 * client boundary.  All quaternions are scalar-first [w, x, y, z].
 */

import { z } from "zod";

export const Vec3 = z.tuple([z.number(), z.number(), z.number()]);
export type Vec3 = z.infer<typeof Vec3>;

export const Vec2 = z.tuple([z.number(), z.number()]);
export type Vec2 = z.infer<typeof Vec2>;

export const Quat = z.tuple([z.number(), z.number(), z.number(), z.number()]);
export type Quat = z.infer<typeof Quat>;

export const PoseSchema = z.object({
  position: z.array(z.number()).length(3),
  orientation: z.array(z.number()).length(4),
});
export type Pose = z.infer<typeof PoseSchema>;

export const SliceSchema = z.object({
  pose: PoseSchema,
  external_handles: z.array(z.array(z.number()).length(2)),
  hole_handles: z.array(z.array(z.number()).length(2)).nullable(),
  hole_scale: z.number(),
});
export type Slice = z.infer<typeof SliceSchema>;

export const ScaffoldSchema = z.object({
  slices: z.array(SliceSchema),
  cloud: z.string().nullable(),
  name: z.string(),
  tension: z.number(),
  obb: z
    .object({
      center: z.array(z.number()).length(3),
      axes: z.array(z.array(z.number()).length(3)).length(3),
      half_extents: z.array(z.number()).length(3),
    })
    .nullable(),
  primitive: z.string().nullable(),
});
export type Scaffold = z.infer<typeof ScaffoldSchema>;

export const AssemblySchema = z.object({
  parts: z.array(ScaffoldSchema),
  name: z.string(),
});
export type Assembly = z.infer<typeof AssemblySchema>;

export const CloudSchema = z.object({
  points: z.array(z.array(z.number()).length(3)),
  colors: z.array(z.array(z.number()).length(3)).nullable(),
  name: z.string(),
});
export type Cloud = z.infer<typeof CloudSchema>;

export const GraspSchema = z.object({
  grasp_pose: PoseSchema,
  pre_grasp: PoseSchema,
  frame: z.string(),
  object_ref: z.string(),
  labels: z.record(z.string(), z.string()),
});
export type Grasp = z.infer<typeof GraspSchema>;

export const PathSchema = z.object({
  poses: z.array(PoseSchema),
  timestamps: z.array(z.number()).nullable(),
  object_ref: z.string(),
});
export type Path = z.infer<typeof PathSchema>;

export const FlagsSchema = z.object({
  visible: z.boolean(),
  locked: z.boolean(),
});
export type Flags = z.infer<typeof FlagsSchema>;

export const DocumentSchema = z.object({
  version: z.string(),
  clouds: z.record(z.string(), CloudSchema),
  assemblies: z.record(z.string(), AssemblySchema),
  grasps: z.record(z.string(), GraspSchema),
  paths: z.record(z.string(), PathSchema),
  reports: z.record(z.string(), z.record(z.string(), z.unknown())),
  flags: z.record(z.string(), FlagsSchema),
});
export type ProjectDocument = z.infer<typeof DocumentSchema>;

export const LogRecordSchema = z.object({
  timestamp: z.number(),
  op: z.string(),
  params: z.record(z.string(), z.unknown()),
  duration: z.number(),
});
export type LogRecord = z.infer<typeof LogRecordSchema>;

export const MeshJobResultSchema = z.object({
  status: z.enum(["pending", "done", "error"]),
  mesh: z
    .object({
      vertices: z.array(z.array(z.number()).length(3)),
      triangles: z.array(z.array(z.number()).length(3)),
      label: z.string(),
    })
    .optional(),
  error: z.string().optional(),
  message: z.string().optional(),
});
export type MeshJobResult = z.infer<typeof MeshJobResultSchema>;

export const GraspEvalSchema = z.object({
  gws_volume: z.number(),
  epsilon: z.number(),
  force_closure: z.boolean(),
  torque_scale: z.number(),
  contact_count: z.number(),
});
export type GraspEval = z.infer<typeof GraspEvalSchema>;

export const ServiceErrorSchema = z.object({
  error: z.string(),
  message: z.string(),
});

/** Typed failure raised for non-2xx service responses. */
export class ServiceError extends Error {
  constructor(
    public readonly errorType: string,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export function emptyDocument(): ProjectDocument {
  return {
    version: "1",
    clouds: {},
    assemblies: {},
    grasps: {},
    paths: {},
    reports: {},
    flags: {},
  };
}
