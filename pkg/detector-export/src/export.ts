/**
 * Export orchestration: run a detector over every frame in a directory, emit
 * a detection stream, and (optionally) score each face crop with a classifier
 * into a recorded-scores file. Both outputs are canonical line-delimited JSON
 * the engine's readers accept unchanged.
 */

import { writeFileSync } from "node:fs";

import { Geometry, expandCrop, rasterizeCrop } from "./geometry.js";
import { DecodedImage, FrameFile, decodeImage, imageGeometry, listFrames } from "./images.js";
import {
  FrameDetections,
  ScoresRecord,
  detectionStreamLines,
  scoresLines,
} from "./formats.js";
import { ExportManifest } from "./manifest.js";
import { SyntheticClassifier, SyntheticDetector } from "./backends/synthetic.js";
import { Detector, FaceClassifier } from "./backends/types.js";

export interface ExportResult {
  geometry: Geometry;
  frames: FrameDetections[];
  scores: ScoresRecord[];
}

async function makeBackends(
  manifest: ExportManifest,
): Promise<{ detector: Detector; classifier: FaceClassifier }> {
  if (manifest.backend === "synthetic") {
    return { detector: new SyntheticDetector(), classifier: new SyntheticClassifier() };
  }
  const missing = (["poseModel", "faceModel", "maskModel", "handModel"] as const).filter(
    (key) => !manifest[key],
  );
  if (missing.length > 0) {
    throw new Error(`tfjs backend needs model paths: ${missing.join(", ")}`);
  }
  const { TfjsClassifier, TfjsDetector } = await import("./backends/tfjs.js");
  return {
    detector: new TfjsDetector({
      poseModelPath: manifest.poseModel!,
      faceModelPath: manifest.faceModel!,
      personConfidence: manifest.personConfidence,
      faceConfidence: manifest.faceConfidence,
      leftShoulderIndex: manifest.leftShoulderIndex,
      rightShoulderIndex: manifest.rightShoulderIndex,
    }),
    classifier: new TfjsClassifier({
      maskModelPath: manifest.maskModel!,
      handModelPath: manifest.handModel!,
      inputEdge: manifest.inputEdge,
    }),
  };
}

function checkGeometry(frame: FrameFile, geometry: Geometry, expected: Geometry): void {
  if (geometry.width !== expected.width || geometry.height !== expected.height) {
    throw new Error(
      `${frame.path}: ${geometry.width}x${geometry.height} does not match ` +
        `first frame ${expected.width}x${expected.height}`,
    );
  }
}

export async function runExport(manifest: ExportManifest): Promise<ExportResult> {
  const frameFiles = listFrames(manifest.framesDir);
  const geometry = imageGeometry(frameFiles[0].path);
  const { detector, classifier } = await makeBackends(manifest);

  const frames: FrameDetections[] = [];
  const scores: ScoresRecord[] = [];
  for (const frameFile of frameFiles) {
    const image: DecodedImage = decodeImage(frameFile.path);
    checkGeometry(frameFile, { width: image.width, height: image.height }, geometry);
    const detections = await detector.detect(image, frameFile.frameId);
    frames.push({ frameId: frameFile.frameId, ...detections });
    if (manifest.scoresOut === undefined) {
      continue;
    }
    for (const face of detections.faces) {
      const crop = rasterizeCrop(expandCrop(face.box, geometry, manifest.marginFraction));
      const { mask, hand } = await classifier.classify(image, crop);
      scores.push({
        frameId: frameFile.frameId,
        faceId: face.id,
        maskScores: mask,
        handScores: hand,
      });
    }
  }

  writeFileSync(
    manifest.detectionsOut,
    detectionStreamLines(manifest.videoId, geometry, frames).join("\n") + "\n",
  );
  if (manifest.scoresOut !== undefined) {
    writeFileSync(manifest.scoresOut, scoresLines(scores).join("\n") + "\n");
  }
  return { geometry, frames, scores };
}
