#!/usr/bin/env python3
"""Measure engine throughput (Recorded backend, no rendering) on synthetic
frames; prints frames/second for a few crowd sizes."""

from __future__ import annotations

import argparse
import math
import random
import time

from crowdguard.config import EngineConfig
from crowdguard.faces import recorded_backends
from crowdguard.formats import RecordedScoresEntry
from crowdguard.model import (BoundingBox, FaceDetection, Frame, ImageGeometry,
                              PersonDetection, Point2D)
from crowdguard.pipeline import process_frame

GEOMETRY = ImageGeometry(1000, 1000)


def build_frames(rng: random.Random, n_frames: int, n_persons: int):
    frames, table = [], {}
    for i in range(n_frames):
        persons = []
        for j in range(n_persons):
            cx, cy = rng.uniform(100, 900), rng.uniform(100, 900)
            w = rng.uniform(20, 80)
            angle = rng.uniform(0, 2 * math.pi)
            dx, dy = math.cos(angle) * w / 2, math.sin(angle) * w / 2
            persons.append(PersonDetection(
                id=f"p{j}", box=BoundingBox(max(0, cx - w), max(0, cy - w),
                                            min(1000, cx + w), min(1000, cy + w)),
                left_shoulder=Point2D(cx - dx, cy - dy),
                right_shoulder=Point2D(cx + dx, cy + dy)))
        faces = [FaceDetection(id=f"f{j}", box=BoundingBox(40 * j, 10, 40 * j + 30, 40))
                 for j in range(2)]
        frames.append(Frame(frame_id=i, geometry=GEOMETRY,
                            persons=tuple(persons), faces=tuple(faces)))
        for j in range(2):
            table[(i, f"f{j}")] = RecordedScoresEntry(i, f"f{j}", (0.1, 0.8, 0.1),
                                                      (0.2, 0.8))
    return frames, table


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    config = EngineConfig()
    for n_persons in (2, 3, 5, 8):
        rng = random.Random(args.seed)
        frames, table = build_frames(rng, args.frames, n_persons)
        mask_backend, hand_backend = recorded_backends(table)
        start = time.perf_counter()
        for frame in frames:
            process_frame(frame, config, mask_backend, hand_backend)
        elapsed = time.perf_counter() - start
        print(f"{n_persons} persons/frame: {args.frames / elapsed:>10,.0f} frames/s")


if __name__ == "__main__":
    main()
