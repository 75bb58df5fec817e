/**
 * Frame-directory handling and raster decoding (PNG via pngjs, JPEG via
 * jpeg-js). Frames are ordered by sorted filename; frame ids are the indices
 * in that order, which keeps the emitted stream strictly increasing even for
 * arbitrary naming schemes.
 */

import { readdirSync, readFileSync } from "node:fs";
import { extname, join } from "node:path";

import jpeg from "jpeg-js";
import { PNG } from "pngjs";

import { Geometry } from "./geometry.js";

export interface DecodedImage {
  width: number;
  height: number;
  /** RGBA, 4 bytes per pixel. */
  data: Uint8Array;
}

export interface FrameFile {
  frameId: number;
  path: string;
}

const SUPPORTED = new Set([".png", ".jpg", ".jpeg"]);

export function listFrames(framesDir: string): FrameFile[] {
  const names = readdirSync(framesDir)
    .filter((name) => SUPPORTED.has(extname(name).toLowerCase()))
    .sort();
  if (names.length === 0) {
    throw new Error(`no supported images (*.png, *.jpg) in ${framesDir}`);
  }
  return names.map((name, index) => ({ frameId: index, path: join(framesDir, name) }));
}

export function decodeImage(path: string): DecodedImage {
  const bytes = readFileSync(path);
  const ext = extname(path).toLowerCase();
  if (ext === ".png") {
    const png = PNG.sync.read(bytes);
    return { width: png.width, height: png.height, data: png.data };
  }
  const decoded = jpeg.decode(bytes, { useTArray: true });
  return { width: decoded.width, height: decoded.height, data: decoded.data };
}

/** Dimensions only; PNG reads the IHDR header, JPEG does a full decode. */
export function imageGeometry(path: string): Geometry {
  if (extname(path).toLowerCase() === ".png") {
    const bytes = readFileSync(path);
    // IHDR: width and height are big-endian u32 at offsets 16 and 20
    if (bytes.length < 24 || bytes.readUInt32BE(12) !== 0x49484452) {
      throw new Error(`${path}: not a valid PNG`);
    }
    return { width: bytes.readUInt32BE(16), height: bytes.readUInt32BE(20) };
  }
  const { width, height } = decodeImage(path);
  return { width, height };
}
