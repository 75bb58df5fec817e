"""Scoring engine output against annotations.

Protocol: predictions are matched to annotated subjects per frame (by id, or
greedily by IoU when ids differ across sources); annotated subjects with no
matched detection are ignored, never counted as errors. Accuracies are
reported per video plus a pooled Total row (micro-average over counts).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .distancing import DistanceStatus
from .formats import GroundTruthFrame, GroundTruthSubject
from .model import BoundingBox
from .report import FrameReport, ReportFace, ReportSubject


class MatchMode(Enum):
    BY_ID = "by_id"
    BY_IOU = "by_iou"


class Task(Enum):
    MASK = "mask"
    FACE_HAND = "face_hand"
    DISTANCE = "distance"


@dataclass(frozen=True)
class MatchingConfig:
    iou_threshold: float = 0.5
    mode: MatchMode = MatchMode.BY_ID

    def __post_init__(self) -> None:
        if not (0.0 < self.iou_threshold <= 1.0):
            raise ValueError("iou_threshold must be in (0, 1]")


@dataclass(frozen=True)
class TaskAccuracy:
    task: Task
    correct: int
    scored: int

    @property
    def accuracy(self) -> float | None:
        """correct/scored; None (not zero) when nothing was scored."""
        if self.scored == 0:
            return None
        return self.correct / self.scored


@dataclass(frozen=True)
class FrameMatch:
    """Correspondences for one frame, split by entity kind; `missing` holds
    annotated subject ids with no matched detection (excluded from scoring)."""

    face_pairs: tuple[tuple[GroundTruthSubject, ReportFace], ...]
    person_pairs: tuple[tuple[GroundTruthSubject, ReportSubject], ...]
    missing: tuple[str, ...]


def iou(a: BoundingBox, b: BoundingBox) -> float:
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.width * a.height + b.width * b.height - inter
    if union <= 0:
        return 0.0
    return inter / union


def _greedy_iou(gt_items: Sequence[tuple[GroundTruthSubject, BoundingBox | None]],
                predictions: dict, threshold: float) -> tuple[list, list[str]]:
    candidates = []
    for gt, gt_box in gt_items:
        if gt_box is None:
            continue
        for pred_id, pred_box in predictions.items():
            value = iou(gt_box, pred_box)
            if value >= threshold:
                candidates.append((value, gt.id, pred_id, gt))
    # highest IoU first; ties broken lexicographically for determinism
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    matched_gt: dict[str, str] = {}
    used_preds: set[str] = set()
    for _, gt_id, pred_id, _gt in candidates:
        if gt_id in matched_gt or pred_id in used_preds:
            continue
        matched_gt[gt_id] = pred_id
        used_preds.add(pred_id)
    pairs = [(gt, matched_gt[gt.id]) for gt, _ in gt_items if gt.id in matched_gt]
    missing = [gt.id for gt, _ in gt_items if gt.id not in matched_gt]
    return pairs, missing


def match_subjects(report: FrameReport, gt_frame: GroundTruthFrame,
                   config: MatchingConfig = MatchingConfig()) -> FrameMatch:
    """Build the per-frame correspondence map.

    An annotated subject is relevant to faces when it carries a mask or hand
    label, to persons when it carries a distance label; each detection is
    matched at most once per kind.
    """
    faces = {rf.assessment.face_id: rf for rf in report.faces}
    persons = {rs.status.person_id: rs for rs in report.subjects}
    gt_faces = [s for s in gt_frame.subjects if s.mask is not None or s.hand is not None]
    gt_persons = [s for s in gt_frame.subjects if s.distance is not None]

    missing: list[str] = []
    if config.mode is MatchMode.BY_ID:
        face_pairs = []
        for gt in gt_faces:
            if gt.id in faces:
                face_pairs.append((gt, faces[gt.id]))
            else:
                missing.append(gt.id)
        person_pairs = []
        for gt in gt_persons:
            if gt.id in persons:
                person_pairs.append((gt, persons[gt.id]))
            else:
                missing.append(gt.id)
    else:
        face_matches, face_missing = _greedy_iou(
            [(gt, gt.box) for gt in gt_faces],
            {fid: rf.box for fid, rf in faces.items()},
            config.iou_threshold)
        person_matches, person_missing = _greedy_iou(
            [(gt, gt.box) for gt in gt_persons],
            {pid: rs.box for pid, rs in persons.items()},
            config.iou_threshold)
        face_pairs = [(gt, faces[pred_id]) for gt, pred_id in face_matches]
        person_pairs = [(gt, persons[pred_id]) for gt, pred_id in person_matches]
        missing = face_missing + person_missing

    return FrameMatch(face_pairs=tuple(face_pairs),
                      person_pairs=tuple(person_pairs),
                      missing=tuple(missing))


def score_task(matches: Iterable[FrameMatch], task: Task) -> TaskAccuracy:
    """Exact label agreement over matched pairs. Distance additionally skips
    predictions the engine marked Unassessed."""
    correct = 0
    scored = 0
    for match in matches:
        if task is Task.MASK:
            for gt, rf in match.face_pairs:
                if gt.mask is None:
                    continue
                scored += 1
                correct += gt.mask is rf.assessment.mask_label
        elif task is Task.FACE_HAND:
            for gt, rf in match.face_pairs:
                if gt.hand is None:
                    continue
                scored += 1
                correct += gt.hand is rf.assessment.hand_label
        else:
            for gt, rs in match.person_pairs:
                if gt.distance is None or rs.status.status is DistanceStatus.UNASSESSED:
                    continue
                scored += 1
                correct += gt.distance == rs.status.status.value
    return TaskAccuracy(task=task, correct=correct, scored=scored)


@dataclass(frozen=True)
class VideoScores:
    video_id: str
    frame_count: int
    accuracies: dict  # Task -> TaskAccuracy


@dataclass(frozen=True)
class EvaluationTable:
    videos: tuple[VideoScores, ...]
    total: VideoScores


def evaluate_video(video_id: str, reports: Sequence[FrameReport],
                   gt_frames: Sequence[GroundTruthFrame],
                   config: MatchingConfig = MatchingConfig()) -> VideoScores:
    by_frame = {r.frame_id: r for r in reports}
    empty = FrameReport(frame_id=-1, faces=(), pairs=(), subjects=())
    matches = [match_subjects(by_frame.get(gt.frame_id, empty), gt, config)
               for gt in gt_frames]
    return VideoScores(video_id=video_id, frame_count=len(reports),
                       accuracies={task: score_task(matches, task) for task in Task})


def evaluate_videos(items: Sequence[tuple[str, Sequence[FrameReport], Sequence[GroundTruthFrame]]],
                    config: MatchingConfig = MatchingConfig()) -> EvaluationTable:
    """Per-video accuracies plus a pooled-count Total row."""
    videos = tuple(evaluate_video(video_id, reports, gts, config)
                   for video_id, reports, gts in items)
    totals = {}
    for task in Task:
        correct = sum(v.accuracies[task].correct for v in videos)
        scored = sum(v.accuracies[task].scored for v in videos)
        totals[task] = TaskAccuracy(task=task, correct=correct, scored=scored)
    total = VideoScores(video_id="Total",
                        frame_count=sum(v.frame_count for v in videos),
                        accuracies=totals)
    return EvaluationTable(videos=videos, total=total)


def _accuracy_cell(acc: TaskAccuracy) -> str:
    if acc.accuracy is None:
        return "-"
    return f"{100.0 * acc.accuracy:.2f}%"


def format_table(table: EvaluationTable) -> str:
    """Human-readable accuracy table, one row per video plus Total."""
    header = f"{'Video':<16}{'# frames':>10}{'Mask acc.':>12}{'Face-hand acc.':>16}{'Distance acc.':>15}"
    lines = [header, "-" * len(header)]
    for row in (*table.videos, table.total):
        lines.append(f"{row.video_id:<16}{row.frame_count:>10}"
                     f"{_accuracy_cell(row.accuracies[Task.MASK]):>12}"
                     f"{_accuracy_cell(row.accuracies[Task.FACE_HAND]):>16}"
                     f"{_accuracy_cell(row.accuracies[Task.DISTANCE]):>15}")
    return "\n".join(lines)


def table_to_record(table: EvaluationTable) -> dict:
    """Machine-readable form of the accuracy table."""
    def row(scores: VideoScores) -> dict:
        out: dict = {"video_id": scores.video_id, "frame_count": scores.frame_count}
        for task in Task:
            acc = scores.accuracies[task]
            out[task.value] = {"correct": acc.correct, "scored": acc.scored,
                               "accuracy": acc.accuracy}
        return out
    return {"videos": [row(v) for v in table.videos], "total": row(table.total)}
