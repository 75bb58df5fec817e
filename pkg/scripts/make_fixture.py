#!/usr/bin/env python3
"""Generate a synthetic detection stream, recorded scores, and ground truth
that agree with each other, for demos and end-to-end experiments.

Example:
    python3 scripts/make_fixture.py --out-dir /tmp/demo --frames 50 --persons 4
    crowdguard run --detections /tmp/demo/detections.jsonl \
        --scores /tmp/demo/scores.jsonl --out /tmp/demo/report.jsonl
"""

from __future__ import annotations

import argparse
import math
import random
from pathlib import Path

from crowdguard.distancing import assess_frame
from crowdguard.formats import (GroundTruthFrame, GroundTruthSubject,
                                RecordedScoresEntry, StreamHeader,
                                write_detection_stream, write_ground_truth,
                                write_recorded_scores)
from crowdguard.model import (BoundingBox, FaceDetection, Frame, HandLabel,
                              ImageGeometry, MaskLabel, PersonDetection, Point2D)

GEOMETRY = ImageGeometry(1280, 720)


def wandering_person(rng: random.Random, pid: str, t: int) -> PersonDetection:
    cx = 120.0 + (hash(pid) % 900) + 40.0 * math.sin(0.05 * t + hash(pid) % 7)
    cx = min(max(cx, 80.0), 1200.0)
    cy = 300.0 + (hash(pid) % 200)
    width = 35.0 + (hash(pid) % 30)
    return PersonDetection(
        id=pid,
        box=BoundingBox(cx - width, cy - 3 * width, cx + width, cy + 3 * width),
        left_shoulder=Point2D(cx - width / 2, cy),
        right_shoulder=Point2D(cx + width / 2, cy),
        confidence=round(rng.uniform(0.7, 0.99), 3),
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--frames", type=int, default=30)
    parser.add_argument("--persons", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    frames, entries, gt_frames = [], [], []
    for t in range(args.frames):
        persons = [wandering_person(rng, f"p{i}", t) for i in range(args.persons)]
        faces = []
        subjects = []
        for i, person in enumerate(persons):
            fid = f"f{i}"
            cx = (person.box.x_min + person.box.x_max) / 2
            top = person.box.y_min
            faces.append(FaceDetection(id=fid,
                                       box=BoundingBox(cx - 20, top, cx + 20, top + 45),
                                       confidence=0.98, person_id=person.id))
            mask = rng.choice(list(MaskLabel))
            hand = rng.choice(list(HandLabel))
            mask_scores = [0.05, 0.05, 0.05]
            mask_scores[list(MaskLabel).index(mask)] = 0.9
            hand_scores = [0.1, 0.1]
            hand_scores[list(HandLabel).index(hand)] = 0.9
            entries.append(RecordedScoresEntry(t, fid, tuple(mask_scores),
                                               tuple(hand_scores)))
            subjects.append(GroundTruthSubject(id=fid, mask=mask, hand=hand,
                                               box=faces[-1].box))
        frame = Frame(frame_id=t, geometry=GEOMETRY,
                      persons=tuple(persons), faces=tuple(faces))
        frames.append(frame)
        # annotate distance with the engine's own decisions (a consistent world)
        _, statuses = assess_frame(frame)
        for status, person in zip(statuses, persons):
            if status.status.value != "unassessed":
                subjects.append(GroundTruthSubject(id=person.id,
                                                   distance=status.status.value,
                                                   box=person.box))
        gt_frames.append(GroundTruthFrame(frame_id=t, subjects=tuple(subjects)))

    write_detection_stream(out_dir / "detections.jsonl",
                           StreamHeader(1, "synthetic", GEOMETRY, 25.0), frames)
    write_recorded_scores(out_dir / "scores.jsonl", entries)
    write_ground_truth(out_dir / "ground_truth.jsonl", "synthetic", gt_frames)
    print(f"wrote {args.frames} frames to {out_dir}")


if __name__ == "__main__":
    main()
