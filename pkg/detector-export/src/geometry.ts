/**
 * Pixel geometry shared by both export stages. Must stay in lockstep with the
 * engine's conventions: origin top-left, boxes [xMin, yMin, xMax, yMax], and
 * the same margin-expansion rule for face crops.
 */

export interface Box {
  xMin: number;
  yMin: number;
  xMax: number;
  yMax: number;
}

export interface Point {
  x: number;
  y: number;
}

export interface Geometry {
  width: number;
  height: number;
}

export function clamp(value: number, low: number, high: number): number {
  return Math.min(Math.max(value, low), high);
}

export function clampBox(box: Box, geometry: Geometry): Box {
  return {
    xMin: clamp(box.xMin, 0, geometry.width),
    yMin: clamp(box.yMin, 0, geometry.height),
    xMax: clamp(box.xMax, 0, geometry.width),
    yMax: clamp(box.yMax, 0, geometry.height),
  };
}

export function clampPoint(point: Point, geometry: Geometry): Point {
  return {
    x: clamp(point.x, 0, geometry.width),
    y: clamp(point.y, 0, geometry.height),
  };
}

/**
 * Margin-expanded face crop, identical to the engine's rule: each side moves
 * outward by marginFraction times the box's own dimension on that axis, then
 * the result is clamped to the image rectangle.
 */
export function expandCrop(box: Box, geometry: Geometry, marginFraction: number): Box {
  const dx = marginFraction * (box.xMax - box.xMin);
  const dy = marginFraction * (box.yMax - box.yMin);
  return clampBox(
    { xMin: box.xMin - dx, yMin: box.yMin - dy, xMax: box.xMax + dx, yMax: box.yMax + dy },
    geometry,
  );
}

/** Round a fractional crop outward to whole pixels (floor mins, ceil maxes). */
export function rasterizeCrop(box: Box): [number, number, number, number] {
  return [Math.floor(box.xMin), Math.floor(box.yMin), Math.ceil(box.xMax), Math.ceil(box.yMax)];
}
