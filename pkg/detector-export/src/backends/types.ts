/**
 * Backend interfaces. A detector turns a decoded frame into person/face
 * detections; a classifier scores a face crop. Both are async so model-backed
 * implementations can lazy-load weights.
 */

import { DecodedImage } from "../images.js";
import { FaceRecord, PersonRecord } from "../formats.js";

export interface Detections {
  persons: PersonRecord[];
  faces: FaceRecord[];
}

export interface Detector {
  detect(image: DecodedImage, frameId: number): Promise<Detections>;
}

export interface FaceClassifier {
  /** Probability vectors in canonical order:
   *  mask → [no_mask, mask, improper_mask]; hand → [interaction, no_interaction]. */
  classify(
    image: DecodedImage,
    crop: [number, number, number, number],
  ): Promise<{ mask: [number, number, number]; hand: [number, number] }>;
}
