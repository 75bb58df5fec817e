/**
 * Export manifest: everything an export run needs, validated up front with
 * zod so CLI flags and JSON manifests share one schema.
 */

import { readFileSync } from "node:fs";

import { z } from "zod";

const unitInterval = z.number().min(0).max(1);

export const manifestSchema = z.object({
  framesDir: z.string().min(1),
  videoId: z.string().min(1),
  detectionsOut: z.string().min(1),
  scoresOut: z.string().min(1).optional(),
  backend: z.enum(["synthetic", "tfjs"]).default("synthetic"),
  /** tfjs graph-model paths (model.json); required for the tfjs backend. */
  poseModel: z.string().optional(),
  faceModel: z.string().optional(),
  maskModel: z.string().optional(),
  handModel: z.string().optional(),
  personConfidence: unitInterval.default(0.3),
  faceConfidence: unitInterval.default(0.5),
  /** Keypoint indices for the two shoulders in the pose model's output. */
  leftShoulderIndex: z.number().int().nonnegative().default(5),
  rightShoulderIndex: z.number().int().nonnegative().default(6),
  /** Face-crop margin; must match the engine config the scores are fed to. */
  marginFraction: z.number().min(0).default(0.2),
  inputEdge: z.number().int().positive().default(224),
});

export type ExportManifest = z.infer<typeof manifestSchema>;

export function loadManifest(path: string): ExportManifest {
  const raw: unknown = JSON.parse(readFileSync(path, "utf-8"));
  return manifestSchema.parse(raw);
}
