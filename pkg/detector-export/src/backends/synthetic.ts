/**
 * Deterministic model-free backend. Detections and scores are pure functions
 * of (frame index, image dimensions), so exports are reproducible anywhere
 * and the test suite needs no network access or model weights.
 *
 * Layout: persons stand on a horizontal line, drifting apart as the frame
 * index grows; each person carries one face in the upper quarter of its box.
 */

import { clampBox, clampPoint } from "../geometry.js";
import { DecodedImage } from "../images.js";
import { normalize } from "../formats.js";
import { Detections, Detector, FaceClassifier } from "./types.js";

/** Small deterministic PRNG (mulberry32) so scores look like real softmax output. */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export class SyntheticDetector implements Detector {
  constructor(private readonly personsPerFrame = 3) {}

  detect(image: DecodedImage, frameId: number): Promise<Detections> {
    const geometry = { width: image.width, height: image.height };
    const detections: Detections = { persons: [], faces: [] };
    const count = 1 + ((frameId + this.personsPerFrame) % this.personsPerFrame);
    const spread = Math.min(0.12 + 0.02 * frameId, 0.45) * image.width;
    const baseline = 0.55 * image.height;
    const bodyWidth = 0.12 * image.width;
    const bodyHeight = 0.5 * image.height;
    for (let i = 0; i < count; i += 1) {
      const centerX = image.width / 2 + (i - (count - 1) / 2) * spread;
      const box = clampBox(
        {
          xMin: centerX - bodyWidth / 2,
          yMin: baseline - bodyHeight / 2,
          xMax: centerX + bodyWidth / 2,
          yMax: baseline + bodyHeight / 2,
        },
        geometry,
      );
      const shoulderY = baseline - 0.3 * bodyHeight;
      detections.persons.push({
        id: `p${i}`,
        box,
        confidence: 0.9,
        leftShoulder: clampPoint({ x: centerX - 0.35 * bodyWidth, y: shoulderY }, geometry),
        rightShoulder: clampPoint({ x: centerX + 0.35 * bodyWidth, y: shoulderY }, geometry),
      });
      detections.faces.push({
        id: `f${i}`,
        box: clampBox(
          {
            xMin: centerX - 0.2 * bodyWidth,
            yMin: shoulderY - 0.22 * bodyHeight,
            xMax: centerX + 0.2 * bodyWidth,
            yMax: shoulderY - 0.02 * bodyHeight,
          },
          geometry,
        ),
        confidence: 0.85,
        personId: `p${i}`,
      });
    }
    return Promise.resolve(detections);
  }
}

export class SyntheticClassifier implements FaceClassifier {
  classify(
    image: DecodedImage,
    crop: [number, number, number, number],
  ): Promise<{ mask: [number, number, number]; hand: [number, number] }> {
    // Seed from the crop and dims only, so identical inputs score identically.
    const seed =
      (crop[0] * 73856093) ^ (crop[1] * 19349663) ^ (crop[2] * 83492791) ^
      (crop[3] * 2971215073) ^ (image.width * 31 + image.height);
    const rand = mulberry32(seed);
    const mask = normalize([rand(), rand() + 1.5, rand()]) as [number, number, number];
    const hand = normalize([rand(), rand() + 1.0]) as [number, number];
    return Promise.resolve({ mask, hand });
  }
}
