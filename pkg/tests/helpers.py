"""Shared fixture builders for the test suite."""

from __future__ import annotations

import math
import random

from crowdguard.formats import (GroundTruthFrame, GroundTruthSubject,
                                RecordedScoresEntry, StreamHeader,
                                write_detection_stream, write_ground_truth,
                                write_recorded_scores)
from crowdguard.model import (BoundingBox, FaceDetection, Frame, HandLabel,
                              ImageGeometry, MaskLabel, PersonDetection, Point2D)

GEOMETRY = ImageGeometry(1000, 1000)


def person_at(pid: str, center: tuple[float, float], width: float,
              angle: float = 0.0) -> PersonDetection:
    """Person whose shoulder segment has the given center, length and angle."""
    cx, cy = center
    dx = math.cos(angle) * width / 2.0
    dy = math.sin(angle) * width / 2.0
    half = width / 2.0 + 5.0
    return PersonDetection(
        id=pid,
        box=BoundingBox(max(0.0, cx - half), max(0.0, cy - half),
                        min(float(GEOMETRY.width), cx + half),
                        min(float(GEOMETRY.height), cy + half)),
        left_shoulder=Point2D(cx - dx, cy - dy),
        right_shoulder=Point2D(cx + dx, cy + dy),
        confidence=0.9,
    )


def shoulders_person(pid: str, left: tuple[float, float],
                     right: tuple[float, float]) -> PersonDetection:
    xs = [left[0], right[0]]
    ys = [left[1], right[1]]
    return PersonDetection(
        id=pid,
        box=BoundingBox(min(xs), min(ys), max(xs) + 1.0, max(ys) + 1.0),
        left_shoulder=Point2D(*left),
        right_shoulder=Point2D(*right),
        confidence=0.9,
    )


def make_frame(frame_id: int = 0, persons=(), faces=(),
               geometry: ImageGeometry = GEOMETRY) -> Frame:
    return Frame(frame_id=frame_id, geometry=geometry,
                 persons=tuple(persons), faces=tuple(faces))


def random_frame(rng: random.Random, frame_id: int = 0,
                 n_persons: int | None = None,
                 min_persons: int = 2, max_persons: int = 6) -> Frame:
    """Frame with random, non-degenerate shoulder geometry."""
    if n_persons is None:
        n_persons = rng.randint(min_persons, max_persons)
    persons = []
    for i in range(n_persons):
        persons.append(person_at(
            f"p{i}",
            (rng.uniform(100.0, 900.0), rng.uniform(100.0, 900.0)),
            rng.uniform(10.0, 90.0),
            rng.uniform(0.0, 2.0 * math.pi),
        ))
    return make_frame(frame_id=frame_id, persons=persons)


def face_at(fid: str, box: tuple[float, float, float, float],
            person_id: str | None = None) -> FaceDetection:
    return FaceDetection(id=fid, box=BoundingBox(*box), confidence=0.95,
                        person_id=person_id)


def scores_entry(frame_id: int, face_id: str, mask=(0.1, 0.8, 0.1),
                 hand=(0.2, 0.8)) -> RecordedScoresEntry:
    return RecordedScoresEntry(frame_id=frame_id, face_id=face_id,
                               mask_scores=tuple(mask), hand_scores=tuple(hand))


def write_run_fixture(tmp_path, video_id: str = "fixture"):
    """Three-frame fixture with two persons and one face per frame; returns
    (detections_path, scores_path, gt_path).

    Frame layout: persons 60 px wide, centers 150 px apart => threshold 180,
    so the pair violates in every frame. The face is always properly masked
    with no interaction.
    """
    frames = []
    entries = []
    gt_frames = []
    for frame_id in range(3):
        offset = 10.0 * frame_id
        a = person_at("pa", (200.0 + offset, 300.0), 60.0)
        b = person_at("pb", (350.0 + offset, 300.0), 60.0)
        face = face_at("fa", (400.0, 100.0, 460.0, 170.0))
        frames.append(make_frame(frame_id=frame_id, persons=[a, b], faces=[face]))
        entries.append(scores_entry(frame_id, "fa", mask=(0.05, 0.9, 0.05),
                                    hand=(0.1, 0.9)))
        gt_frames.append(GroundTruthFrame(frame_id=frame_id, subjects=(
            GroundTruthSubject(id="fa", mask=MaskLabel.MASK,
                               hand=HandLabel.NO_INTERACTION),
            GroundTruthSubject(id="pa", distance="violates"),
            GroundTruthSubject(id="pb", distance="violates"),
        )))
    detections = tmp_path / "detections.jsonl"
    scores = tmp_path / "scores.jsonl"
    gt = tmp_path / "ground_truth.jsonl"
    write_detection_stream(detections, StreamHeader(1, video_id, GEOMETRY, 25.0), frames)
    write_recorded_scores(scores, entries)
    write_ground_truth(gt, video_id, gt_frames)
    return detections, scores, gt
