/**
 * TensorFlow.js graph-model backend for user-supplied local model files.
 *
 * - Pose: a MoveNet-style multipose model whose output is [1, N, 56] — per
 *   person 17 keypoints as (y, x, score) triples followed by
 *   (yMin, xMin, yMax, xMax, score) in normalized coordinates. The shoulder
 *   keypoint indices are configurable for models with other skeletons.
 * - Face: a generic detector emitting `boxes` [1, N, 4] (normalized
 *   y1, x1, y2, x2) and `scores` [1, N].
 * - Classifiers: image in, logits/probabilities out; crops are expanded,
 *   rasterized and bilinearly resized to a square inputEdge exactly as the
 *   engine's interchange backend does, so recorded scores line up.
 *
 * tfjs is imported lazily: the synthetic backend and the tests never pay for
 * (or require) the dependency at runtime. Models load through a small
 * filesystem IOHandler because the pure-JS tfjs build ships without one.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";

import type { GraphModel, Tensor, Tensor3D, Tensor4D, io } from "@tensorflow/tfjs";

import { expandCrop, rasterizeCrop } from "../geometry.js";
import { DecodedImage } from "../images.js";
import { FaceRecord, PersonRecord, normalize } from "../formats.js";
import { Detections, Detector, FaceClassifier } from "./types.js";

type Tf = typeof import("@tensorflow/tfjs");

let tfPromise: Promise<Tf> | undefined;
function tf(): Promise<Tf> {
  tfPromise ??= import("@tensorflow/tfjs");
  return tfPromise;
}

/** Load a graph model from a local model.json plus its weight shards. */
async function loadLocalGraphModel(modelJsonPath: string): Promise<GraphModel> {
  const lib = await tf();
  const modelDir = dirname(modelJsonPath);
  const modelJson = JSON.parse(readFileSync(modelJsonPath, "utf-8")) as {
    modelTopology: object;
    weightsManifest: { paths: string[]; weights: io.WeightsManifestEntry[] }[];
    format?: string;
    generatedBy?: string;
    convertedBy?: string;
    signature?: object;
  };
  const weightSpecs = modelJson.weightsManifest.flatMap((group) => group.weights);
  const shards = modelJson.weightsManifest.flatMap((group) =>
    group.paths.map((p) => readFileSync(join(modelDir, p))),
  );
  const total = shards.reduce((n, shard) => n + shard.byteLength, 0);
  const weightData = new Uint8Array(total);
  let offset = 0;
  for (const shard of shards) {
    weightData.set(shard, offset);
    offset += shard.byteLength;
  }
  const handler = lib.io.fromMemory({
    modelTopology: modelJson.modelTopology,
    weightSpecs,
    weightData: weightData.buffer,
    format: modelJson.format,
    generatedBy: modelJson.generatedBy,
    convertedBy: modelJson.convertedBy,
    signature: modelJson.signature,
  });
  return lib.loadGraphModel(handler);
}

function toTensor3d(lib: Tf, image: DecodedImage): Tensor3D {
  // RGBA → RGB, int32 [height, width, 3]
  const rgb = new Int32Array(image.width * image.height * 3);
  for (let i = 0, j = 0; i < image.data.length; i += 4, j += 3) {
    rgb[j] = image.data[i];
    rgb[j + 1] = image.data[i + 1];
    rgb[j + 2] = image.data[i + 2];
  }
  return lib.tensor3d(Array.from(rgb), [image.height, image.width, 3], "int32");
}

export interface TfjsDetectorOptions {
  poseModelPath: string;
  faceModelPath: string;
  personConfidence: number;
  faceConfidence: number;
  leftShoulderIndex: number;
  rightShoulderIndex: number;
}

export class TfjsDetector implements Detector {
  private poseModel?: GraphModel;
  private faceModel?: GraphModel;

  constructor(private readonly options: TfjsDetectorOptions) {}

  async detect(image: DecodedImage, _frameId: number): Promise<Detections> {
    const lib = await tf();
    this.poseModel ??= await loadLocalGraphModel(this.options.poseModelPath);
    this.faceModel ??= await loadLocalGraphModel(this.options.faceModelPath);

    const persons = await this.detectPersons(lib, image);
    const faces = await this.detectFaces(lib, image);
    return { persons, faces };
  }

  private async detectPersons(lib: Tf, image: DecodedImage): Promise<PersonRecord[]> {
    const input = lib.tidy(() => {
      const frame = toTensor3d(lib, image);
      const batch = frame.expandDims(0) as Tensor4D;
      return lib.image.resizeBilinear(batch, [256, 256]).toInt();
    });
    const output = this.poseModel!.execute(input) as Tensor;
    const rows = (await output.array()) as number[][][];
    input.dispose();
    output.dispose();

    const persons: PersonRecord[] = [];
    const { leftShoulderIndex: li, rightShoulderIndex: ri } = this.options;
    for (const row of rows[0] ?? []) {
      const boxScore = row[55];
      if (boxScore < this.options.personConfidence) continue;
      const at = (k: number) => ({
        y: row[3 * k] * image.height,
        x: row[3 * k + 1] * image.width,
        score: row[3 * k + 2],
      });
      const left = at(li);
      const right = at(ri);
      const hasShoulders =
        left.score >= this.options.personConfidence &&
        right.score >= this.options.personConfidence;
      persons.push({
        id: `p${persons.length}`,
        box: {
          xMin: row[52] * image.width,
          yMin: row[51] * image.height,
          xMax: row[54] * image.width,
          yMax: row[53] * image.height,
        },
        confidence: boxScore,
        leftShoulder: hasShoulders ? { x: left.x, y: left.y } : undefined,
        rightShoulder: hasShoulders ? { x: right.x, y: right.y } : undefined,
      });
    }
    return persons;
  }

  private async detectFaces(lib: Tf, image: DecodedImage): Promise<FaceRecord[]> {
    const input = lib.tidy(() => {
      const frame = toTensor3d(lib, image);
      const batch = frame.expandDims(0) as Tensor4D;
      return lib.image.resizeBilinear(batch, [320, 320]).toFloat().div(255);
    });
    const outputs = this.faceModel!.execute(input, ["boxes", "scores"]) as Tensor[];
    const boxes = (await outputs[0].array()) as number[][][];
    const scores = (await outputs[1].array()) as number[][];
    input.dispose();
    outputs.forEach((t) => t.dispose());

    const faces: FaceRecord[] = [];
    (boxes[0] ?? []).forEach((box, index) => {
      const score = scores[0]?.[index] ?? 0;
      if (score < this.options.faceConfidence) return;
      faces.push({
        id: `f${faces.length}`,
        box: {
          xMin: box[1] * image.width,
          yMin: box[0] * image.height,
          xMax: box[3] * image.width,
          yMax: box[2] * image.height,
        },
        confidence: score,
      });
    });
    return faces;
  }
}

export interface TfjsClassifierOptions {
  maskModelPath: string;
  handModelPath: string;
  inputEdge: number;
}

export class TfjsClassifier implements FaceClassifier {
  private maskModel?: GraphModel;
  private handModel?: GraphModel;

  constructor(private readonly options: TfjsClassifierOptions) {}

  async classify(image: DecodedImage, crop: [number, number, number, number]) {
    const lib = await tf();
    this.maskModel ??= await loadLocalGraphModel(this.options.maskModelPath);
    this.handModel ??= await loadLocalGraphModel(this.options.handModelPath);

    const edge = this.options.inputEdge;
    const input = lib.tidy(() => {
      const frame = toTensor3d(lib, image).toFloat().div(255) as Tensor3D;
      const [x0, y0, x1, y1] = crop;
      const patch = lib.slice(frame, [y0, x0, 0], [y1 - y0, x1 - x0, 3]) as Tensor3D;
      const batch = patch.expandDims(0) as Tensor4D;
      return lib.image.resizeBilinear(batch, [edge, edge]);
    });
    const mask = await this.run(this.maskModel, input, 3);
    const hand = await this.run(this.handModel, input, 2);
    input.dispose();
    return {
      mask: mask as [number, number, number],
      hand: hand as [number, number],
    };
  }

  private async run(model: GraphModel, input: Tensor, classes: number): Promise<number[]> {
    const lib = await tf();
    const output = model.execute(input) as Tensor;
    const flat = lib.tidy(() => lib.softmax(output.reshape([classes])));
    output.dispose();
    const values = Array.from(await flat.data());
    flat.dispose();
    return normalize(values);
  }
}

/** Engine-compatible integer crop window for a face box. */
export function cropWindow(
  box: { xMin: number; yMin: number; xMax: number; yMax: number },
  geometry: { width: number; height: number },
  marginFraction: number,
): [number, number, number, number] {
  return rasterizeCrop(expandCrop(box, geometry, marginFraction));
}
