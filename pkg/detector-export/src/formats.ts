/**
 * Writers for the engine's line-delimited JSON formats (detection streams and
 * recorded classifier scores). Output is canonical: keys sorted, no
 * whitespace, one record per line, frames in strictly increasing frame_id
 * order — every emitted file must pass `crowdguard validate`.
 */

import { Box, Geometry, Point } from "./geometry.js";

export interface PersonRecord {
  id: string;
  box: Box;
  leftShoulder?: Point;
  rightShoulder?: Point;
  confidence: number;
}

export interface FaceRecord {
  id: string;
  box: Box;
  confidence: number;
  personId?: string;
}

export interface FrameDetections {
  frameId: number;
  persons: PersonRecord[];
  faces: FaceRecord[];
}

export interface ScoresRecord {
  frameId: number;
  faceId: string;
  maskScores: [number, number, number];
  handScores: [number, number];
}

/** JSON.stringify with recursively sorted object keys. */
export function canonicalJson(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .filter(([, v]) => v !== undefined)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0));
    return `{${entries.map(([k, v]) => `${JSON.stringify(k)}:${canonicalJson(v)}`).join(",")}}`;
  }
  return JSON.stringify(value);
}

const boxArray = (box: Box) => [box.xMin, box.yMin, box.xMax, box.yMax];

export function detectionStreamLines(
  videoId: string,
  geometry: Geometry,
  frames: FrameDetections[],
): string[] {
  const lines = [
    canonicalJson({
      kind: "header",
      format_version: 1,
      video_id: videoId,
      width: geometry.width,
      height: geometry.height,
    }),
  ];
  const sorted = [...frames].sort((a, b) => a.frameId - b.frameId);
  for (const frame of sorted) {
    lines.push(
      canonicalJson({
        kind: "frame",
        frame_id: frame.frameId,
        persons: frame.persons.map((p) => ({
          id: p.id,
          box: boxArray(p.box),
          confidence: p.confidence,
          left_shoulder: p.leftShoulder ? [p.leftShoulder.x, p.leftShoulder.y] : undefined,
          right_shoulder: p.rightShoulder ? [p.rightShoulder.x, p.rightShoulder.y] : undefined,
        })),
        faces: frame.faces.map((f) => ({
          id: f.id,
          box: boxArray(f.box),
          confidence: f.confidence,
          person_id: f.personId,
        })),
      }),
    );
  }
  return lines;
}

export function scoresLines(records: ScoresRecord[]): string[] {
  const sorted = [...records].sort(
    (a, b) => a.frameId - b.frameId || (a.faceId < b.faceId ? -1 : a.faceId > b.faceId ? 1 : 0),
  );
  return sorted.map((r) =>
    canonicalJson({
      frame_id: r.frameId,
      face_id: r.faceId,
      mask_scores: r.maskScores,
      hand_scores: r.handScores,
    }),
  );
}

/** Renormalize a nonnegative vector so it sums to exactly 1 within 1e-6. */
export function normalize(scores: number[]): number[] {
  const clipped = scores.map((s) => (Number.isFinite(s) && s > 0 ? s : 0));
  const total = clipped.reduce((a, b) => a + b, 0);
  if (total <= 0) {
    return clipped.map(() => 1 / clipped.length);
  }
  return clipped.map((s) => s / total);
}
