#!/usr/bin/env node
/**
 * detector-export: run detectors over a frame directory and write detection
 * stream + recorded scores files for the compliance engine.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { runExport } from "./export.js";
import { loadManifest, manifestSchema } from "./manifest.js";

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .scriptName("detector-export")
    .usage("$0 --frames DIR --video-id ID --detections-out FILE [options]")
    .option("manifest", { type: "string", describe: "JSON manifest; flags override it" })
    .option("frames", { type: "string", describe: "directory of frame images" })
    .option("video-id", { type: "string" })
    .option("detections-out", { type: "string" })
    .option("scores-out", { type: "string" })
    .option("backend", { choices: ["synthetic", "tfjs"] as const })
    .option("pose-model", { type: "string" })
    .option("face-model", { type: "string" })
    .option("mask-model", { type: "string" })
    .option("hand-model", { type: "string" })
    .option("person-confidence", { type: "number" })
    .option("face-confidence", { type: "number" })
    .option("left-shoulder-index", { type: "number" })
    .option("right-shoulder-index", { type: "number" })
    .option("margin-fraction", { type: "number" })
    .option("input-edge", { type: "number" })
    .strict()
    .help()
    .parse();

  const base = argv.manifest ? loadManifest(argv.manifest) : {};
  const overrides = {
    framesDir: argv.frames,
    videoId: argv["video-id"],
    detectionsOut: argv["detections-out"],
    scoresOut: argv["scores-out"],
    backend: argv.backend,
    poseModel: argv["pose-model"],
    faceModel: argv["face-model"],
    maskModel: argv["mask-model"],
    handModel: argv["hand-model"],
    personConfidence: argv["person-confidence"],
    faceConfidence: argv["face-confidence"],
    leftShoulderIndex: argv["left-shoulder-index"],
    rightShoulderIndex: argv["right-shoulder-index"],
    marginFraction: argv["margin-fraction"],
    inputEdge: argv["input-edge"],
  };
  const merged = {
    ...base,
    ...Object.fromEntries(Object.entries(overrides).filter(([, v]) => v !== undefined)),
  };
  const manifest = manifestSchema.parse(merged);

  const result = await runExport(manifest);
  const faces = result.frames.reduce((n, f) => n + f.faces.length, 0);
  console.log(
    `wrote ${result.frames.length} frames (${faces} faces) to ${manifest.detectionsOut}` +
      (manifest.scoresOut ? `; ${result.scores.length} score records to ${manifest.scoresOut}` : ""),
  );
  return 0;
}

main()
  .then((code) => process.exit(code))
  .catch((error: unknown) => {
    console.error(`error: ${error instanceof Error ? error.message : String(error)}`);
    process.exit(1);
  });
