"""Per-frame reports and per-video summaries, plus their file form.

A report fuses the face branch and the distance branch for one frame and is
self-contained for downstream consumers: it carries the detection boxes so
evaluation and rendering never need the original detection stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .distancing import DistanceStatus, PairAssessment, SubjectDistanceStatus
from .errors import IdMismatchError, StreamParseError, VersionError
from .faces import FaceAssessment
from .formats import (FORMAT_VERSION, BoundingBox, StreamHeader, dumps_record,
                      iter_records, _open)
from .model import Frame, HandLabel, ImageGeometry, MaskLabel


@dataclass(frozen=True)
class ReportFace:
    assessment: FaceAssessment
    box: BoundingBox  # original detection box, pre-margin


@dataclass(frozen=True)
class ReportSubject:
    status: SubjectDistanceStatus
    box: BoundingBox


@dataclass(frozen=True)
class FrameReport:
    frame_id: int
    faces: tuple[ReportFace, ...]
    pairs: tuple[PairAssessment, ...]
    subjects: tuple[ReportSubject, ...]
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class VideoSummary:
    video_id: str
    frame_count: int
    mask_counts: dict
    hand_counts: dict
    distance_counts: dict
    violating_pairs: int
    pair_count: int
    fps: float | None = None


def build_frame_report(frame: Frame,
                       face_assessments: Iterable[FaceAssessment],
                       face_warnings: Iterable[str],
                       pair_assessments: Iterable[PairAssessment],
                       subject_statuses: Iterable[SubjectDistanceStatus]) -> FrameReport:
    """Deterministically assemble one frame's outcomes.

    Every referenced id must exist in the source frame; Unassessed subjects
    and per-face classifier failures surface as warnings.
    """
    faces_by_id = {f.id: f for f in frame.faces}
    persons_by_id = {p.id: p for p in frame.persons}

    report_faces = []
    for assessment in face_assessments:
        face = faces_by_id.get(assessment.face_id)
        if face is None:
            raise IdMismatchError(f"face assessment references unknown id "
                                  f"{assessment.face_id!r} in frame {frame.frame_id}")
        report_faces.append(ReportFace(assessment=assessment, box=face.box))

    warnings = list(face_warnings)
    report_subjects = []
    for status in subject_statuses:
        person = persons_by_id.get(status.person_id)
        if person is None:
            raise IdMismatchError(f"distance status references unknown id "
                                  f"{status.person_id!r} in frame {frame.frame_id}")
        report_subjects.append(ReportSubject(status=status, box=person.box))
        if status.status is DistanceStatus.UNASSESSED and status.reason:
            warnings.append(f"unassessed: {status.reason} ({status.person_id})")

    pairs = tuple(pair_assessments)
    for pair in pairs:
        for pid in (pair.person_a, pair.person_b):
            if pid not in persons_by_id:
                raise IdMismatchError(f"pair assessment references unknown id {pid!r} "
                                      f"in frame {frame.frame_id}")

    return FrameReport(frame_id=frame.frame_id, faces=tuple(report_faces),
                       pairs=pairs, subjects=tuple(report_subjects),
                       warnings=tuple(warnings))


def summarize_video(video_id: str, reports: Iterable[FrameReport],
                    elapsed_seconds: float | None = None) -> VideoSummary:
    """Fold frame reports into Table-style totals. Count fields are additive,
    so partial summaries over a partition of the frames merge fieldwise."""
    mask_counts = {label.value: 0 for label in MaskLabel}
    hand_counts = {label.value: 0 for label in HandLabel}
    distance_counts = {status.value: 0 for status in DistanceStatus}
    frame_count = 0
    violating_pairs = 0
    pair_count = 0
    for report in reports:
        frame_count += 1
        for rf in report.faces:
            mask_counts[rf.assessment.mask_label.value] += 1
            hand_counts[rf.assessment.hand_label.value] += 1
        for subject in report.subjects:
            distance_counts[subject.status.status.value] += 1
        pair_count += len(report.pairs)
        violating_pairs += sum(1 for p in report.pairs if p.violation)
    fps = None
    if elapsed_seconds is not None and elapsed_seconds > 0:
        fps = frame_count / elapsed_seconds
    return VideoSummary(video_id=video_id, frame_count=frame_count,
                        mask_counts=mask_counts, hand_counts=hand_counts,
                        distance_counts=distance_counts,
                        violating_pairs=violating_pairs, pair_count=pair_count,
                        fps=fps)


# ---------------------------------------------------------------------------
# file form

def _scores_dict(labels, scores) -> dict:
    return {label.value: score for label, score in zip(labels, scores)}


def report_to_record(report: FrameReport) -> dict:
    faces = []
    for rf in report.faces:
        a = rf.assessment
        faces.append({
            "id": a.face_id,
            "box": list(rf.box.as_tuple()),
            "crop_box": list(a.crop_box.as_tuple()),
            "mask": a.mask_label.value,
            "mask_scores": _scores_dict(MaskLabel, a.mask_scores),
            "hand": a.hand_label.value,
            "hand_scores": _scores_dict(HandLabel, a.hand_scores),
        })
    pairs = [{"a": p.person_a, "b": p.person_b, "distance": p.distance,
              "threshold": p.threshold, "violation": p.violation}
             for p in report.pairs]
    subjects = []
    for rs in report.subjects:
        raw: dict = {"id": rs.status.person_id, "box": list(rs.box.as_tuple()),
                     "status": rs.status.status.value}
        if rs.status.reason is not None:
            raw["reason"] = rs.status.reason
        subjects.append(raw)
    return {"kind": "frame_report", "frame_id": report.frame_id,
            "faces": faces, "pairs": pairs, "subjects": subjects,
            "warnings": list(report.warnings)}


def _record_to_report(record: dict, path, line_no) -> FrameReport:
    from .distancing import PairAssessment, SubjectDistanceStatus
    from .faces import FaceAssessment

    try:
        faces = tuple(
            ReportFace(
                assessment=FaceAssessment(
                    face_id=raw["id"],
                    crop_box=BoundingBox(*raw["crop_box"]),
                    mask_label=MaskLabel(raw["mask"]),
                    mask_scores=tuple(raw["mask_scores"][l.value] for l in MaskLabel),
                    hand_label=HandLabel(raw["hand"]),
                    hand_scores=tuple(raw["hand_scores"][l.value] for l in HandLabel),
                ),
                box=BoundingBox(*raw["box"]),
            )
            for raw in record["faces"])
        pairs = tuple(
            PairAssessment(person_a=raw["a"], person_b=raw["b"],
                           distance=raw["distance"], threshold=raw["threshold"],
                           violation=raw["violation"])
            for raw in record["pairs"])
        subjects = tuple(
            ReportSubject(
                status=SubjectDistanceStatus(person_id=raw["id"],
                                             status=DistanceStatus(raw["status"]),
                                             reason=raw.get("reason")),
                box=BoundingBox(*raw["box"]),
            )
            for raw in record["subjects"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StreamParseError(f"malformed frame_report: {exc}", path=path, line_no=line_no)
    return FrameReport(frame_id=record["frame_id"], faces=faces, pairs=pairs,
                       subjects=subjects, warnings=tuple(record.get("warnings", [])))


def write_report(path, header: StreamHeader, reports: Iterable[FrameReport]) -> None:
    from .formats import header_to_record
    with open(path, "w", encoding="utf-8") as out:
        out.write(dumps_record(header_to_record(header, kind="report_header")) + "\n")
        for report in reports:
            out.write(dumps_record(report_to_record(report)) + "\n")


def read_report(source) -> tuple[StreamHeader, list[FrameReport]]:
    from .formats import _parse_header
    stream, path, owns = _open(source)
    reports: list[FrameReport] = []
    try:
        records = iter_records(stream, path)
        try:
            line_no, record = next(records)
        except StopIteration:
            raise StreamParseError("empty report file", path=path)
        header = _parse_header(record, "report_header", path, line_no)
        for line_no, record in records:
            if record.get("kind") != "frame_report":
                raise StreamParseError(f"unexpected record kind {record.get('kind')!r}",
                                       path=path, line_no=line_no)
            reports.append(_record_to_report(record, path, line_no))
    finally:
        if owns:
            stream.close()
    return header, reports


def write_summary(path, summary: VideoSummary) -> None:
    record = {"video_id": summary.video_id, "frame_count": summary.frame_count,
              "mask_counts": summary.mask_counts, "hand_counts": summary.hand_counts,
              "distance_counts": summary.distance_counts,
              "violating_pairs": summary.violating_pairs,
              "pair_count": summary.pair_count}
    if summary.fps is not None:
        record["fps"] = round(summary.fps, 2)
    with open(path, "w", encoding="utf-8") as out:
        out.write(json.dumps(record, sort_keys=True, indent=2) + "\n")
