"""On-disk formats: detection streams, recorded scores, ground truth.

Everything is line-delimited JSON (UTF-8, one record per line) so readers can
stream frame-at-a-time with bounded memory. Field names are documented in
docs/FORMATS.md; these files are the contract with external exporter tools.

Serialization is canonical (sorted keys, minimal separators), so identical
values produce identical bytes.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import (BadDistributionError, DuplicateKeyError, OrderingError,
                     StreamParseError, UnknownLabelError, VersionError)
from .model import (BoundingBox, FaceDetection, Frame, HandLabel, ImageGeometry,
                    MaskLabel, PersonDetection, Point2D, validate_frame)

FORMAT_VERSION = 1

_MASK_BY_NAME = {label.value: label for label in MaskLabel}
_HAND_BY_NAME = {label.value: label for label in HandLabel}
_DISTANCE_NAMES = ("keeps", "violates")


def dumps_record(record: dict) -> str:
    """Canonical one-line JSON used by every writer in the package."""
    return json.dumps(record, sort_keys=True, separators=(",", ":"), allow_nan=False)


def iter_records(source, path: str | None = None) -> Iterator[tuple[int, dict]]:
    """Yield (line_no, parsed record) pairs; blank lines are skipped."""
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise StreamParseError(f"invalid JSON: {exc}", path=path, line_no=line_no)
        if not isinstance(record, dict):
            raise StreamParseError("record is not an object", path=path, line_no=line_no)
        yield line_no, record


def _open(source) -> tuple[io.TextIOBase, str | None, bool]:
    if isinstance(source, (str, bytes)):
        return open(source, "r", encoding="utf-8"), str(source), True
    return source, getattr(source, "name", None), False


def _get(record: dict, key: str, path, line_no):
    if key not in record:
        raise StreamParseError(f"missing field {key!r}", path=path, line_no=line_no)
    return record[key]


def _number(value, name: str, path, line_no) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise StreamParseError(f"field {name!r} is not a finite number",
                               path=path, line_no=line_no)
    return float(value)


@dataclass(frozen=True)
class StreamHeader:
    format_version: int
    video_id: str
    geometry: ImageGeometry
    frame_rate: float | None = None


@dataclass(frozen=True)
class RecordedScoresEntry:
    frame_id: int
    face_id: str
    mask_scores: tuple[float, float, float]
    hand_scores: tuple[float, float]


@dataclass(frozen=True)
class GroundTruthSubject:
    """Annotation for one subject; absent labels mean unannotated. The box,
    when present, enables IoU matching against predictions."""

    id: str
    mask: MaskLabel | None = None
    hand: HandLabel | None = None
    distance: str | None = None  # "keeps" | "violates"
    box: BoundingBox | None = None


@dataclass(frozen=True)
class GroundTruthFrame:
    frame_id: int
    subjects: tuple[GroundTruthSubject, ...] = ()


# ---------------------------------------------------------------------------
# detection streams

def _clamp(value: float, low: float, high: float) -> float:
    return min(max(value, low), high)


def _parse_box(raw, geometry: ImageGeometry, owner: str, path, line_no,
               warn: Callable[[str], None]) -> BoundingBox:
    if not (isinstance(raw, list) and len(raw) == 4):
        raise StreamParseError(f"box for {owner} is not a 4-element array",
                               path=path, line_no=line_no)
    x_min, y_min, x_max, y_max = (_number(v, "box", path, line_no) for v in raw)
    if x_min > x_max:
        raise StreamParseError(f"x_min>x_max for {owner}", path=path, line_no=line_no)
    if y_min > y_max:
        raise StreamParseError(f"y_min>y_max for {owner}", path=path, line_no=line_no)
    clamped = BoundingBox(_clamp(x_min, 0, geometry.width), _clamp(y_min, 0, geometry.height),
                          _clamp(x_max, 0, geometry.width), _clamp(y_max, 0, geometry.height))
    if clamped.as_tuple() != (x_min, y_min, x_max, y_max):
        warn(f"line {line_no}: box clamped to image bounds for {owner}")
    return clamped


def _parse_point(raw, geometry: ImageGeometry, owner: str, field: str, path, line_no,
                 warn: Callable[[str], None]) -> Point2D:
    if not (isinstance(raw, list) and len(raw) == 2):
        raise StreamParseError(f"{field} for {owner} is not a 2-element array",
                               path=path, line_no=line_no)
    x = _number(raw[0], field, path, line_no)
    y = _number(raw[1], field, path, line_no)
    cx, cy = _clamp(x, 0, geometry.width), _clamp(y, 0, geometry.height)
    if (cx, cy) != (x, y):
        warn(f"line {line_no}: {field} clamped from ({x:g},{y:g}) to ({cx:g},{cy:g}) for {owner}")
    return Point2D(cx, cy)


def parse_frame_record(record: dict, geometry: ImageGeometry, path, line_no,
                       warn: Callable[[str], None]) -> Frame:
    frame_id = _get(record, "frame_id", path, line_no)
    if not isinstance(frame_id, int) or isinstance(frame_id, bool):
        raise StreamParseError("frame_id is not an integer", path=path, line_no=line_no)
    persons = []
    for raw in record.get("persons", []):
        owner = f"person {raw.get('id')!r}"
        shoulders = {}
        for side in ("left_shoulder", "right_shoulder"):
            if raw.get(side) is not None:
                shoulders[side] = _parse_point(raw[side], geometry, owner, side,
                                               path, line_no, warn)
        if len(shoulders) == 1:
            raise StreamParseError(f"unpaired shoulder for {owner}", path=path, line_no=line_no)
        persons.append(PersonDetection(
            id=str(_get(raw, "id", path, line_no)),
            box=_parse_box(_get(raw, "box", path, line_no), geometry, owner, path, line_no, warn),
            left_shoulder=shoulders.get("left_shoulder"),
            right_shoulder=shoulders.get("right_shoulder"),
            confidence=_number(raw.get("confidence", 1.0), "confidence", path, line_no),
        ))
    faces = []
    for raw in record.get("faces", []):
        owner = f"face {raw.get('id')!r}"
        faces.append(FaceDetection(
            id=str(_get(raw, "id", path, line_no)),
            box=_parse_box(_get(raw, "box", path, line_no), geometry, owner, path, line_no, warn),
            confidence=_number(raw.get("confidence", 1.0), "confidence", path, line_no),
            person_id=raw.get("person_id"),
        ))
    frame = Frame(frame_id=frame_id, geometry=geometry,
                  persons=tuple(persons), faces=tuple(faces),
                  image_path=record.get("image_path"))
    problems = validate_frame(frame)
    if problems:
        raise StreamParseError("; ".join(problems), path=path, line_no=line_no)
    return frame


def frame_to_record(frame: Frame) -> dict:
    persons = []
    for p in frame.persons:
        raw: dict = {"id": p.id, "box": list(p.box.as_tuple()), "confidence": p.confidence}
        if p.has_shoulders:
            raw["left_shoulder"] = [p.left_shoulder.x, p.left_shoulder.y]
            raw["right_shoulder"] = [p.right_shoulder.x, p.right_shoulder.y]
        persons.append(raw)
    faces = []
    for f in frame.faces:
        raw = {"id": f.id, "box": list(f.box.as_tuple()), "confidence": f.confidence}
        if f.person_id is not None:
            raw["person_id"] = f.person_id
        faces.append(raw)
    record = {"kind": "frame", "frame_id": frame.frame_id, "persons": persons, "faces": faces}
    if frame.image_path is not None:
        record["image_path"] = frame.image_path
    return record


def _parse_header(record: dict, expected_kind: str, path, line_no) -> StreamHeader:
    if record.get("kind") != expected_kind:
        raise StreamParseError(f"first record must be a {expected_kind!r} header",
                               path=path, line_no=line_no)
    version = _get(record, "format_version", path, line_no)
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported format_version {version}", path=path, line_no=line_no)
    width = _get(record, "width", path, line_no)
    height = _get(record, "height", path, line_no)
    if not (isinstance(width, int) and isinstance(height, int) and width >= 1 and height >= 1):
        raise StreamParseError("header geometry must be positive integers",
                               path=path, line_no=line_no)
    frame_rate = record.get("frame_rate")
    if frame_rate is not None:
        frame_rate = _number(frame_rate, "frame_rate", path, line_no)
    return StreamHeader(format_version=version,
                        video_id=str(_get(record, "video_id", path, line_no)),
                        geometry=ImageGeometry(width, height),
                        frame_rate=frame_rate)


def header_to_record(header: StreamHeader, kind: str = "header") -> dict:
    record = {"kind": kind, "format_version": header.format_version,
              "video_id": header.video_id,
              "width": header.geometry.width, "height": header.geometry.height}
    if header.frame_rate is not None:
        record["frame_rate"] = header.frame_rate
    return record


class DetectionStreamReader:
    """Streaming reader: header parsed eagerly, frames yielded lazily in
    strictly increasing frame_id order. Out-of-bounds coordinates are clamped
    and noted in `warnings` (which grows during iteration)."""

    def __init__(self, source):
        stream, self._path, self._owns = _open(source)
        self._records = iter_records(stream, self._path)
        self._stream = stream
        self.warnings: list[str] = []
        try:
            line_no, record = next(self._records)
        except StopIteration:
            raise StreamParseError("empty detection stream", path=self._path)
        self.header = _parse_header(record, "header", self._path, line_no)

    def __iter__(self) -> Iterator[Frame]:
        last_id: int | None = None
        try:
            for line_no, record in self._records:
                if record.get("kind") != "frame":
                    raise StreamParseError(f"unexpected record kind {record.get('kind')!r}",
                                           path=self._path, line_no=line_no)
                frame = parse_frame_record(record, self.header.geometry,
                                           self._path, line_no, self.warnings.append)
                if last_id is not None and frame.frame_id <= last_id:
                    raise OrderingError(
                        f"frame_id {frame.frame_id} not greater than previous {last_id}",
                        path=self._path, line_no=line_no)
                last_id = frame.frame_id
                yield frame
        finally:
            if self._owns:
                self._stream.close()


def read_detection_stream(source) -> DetectionStreamReader:
    return DetectionStreamReader(source)


def write_detection_stream(path, header: StreamHeader, frames: Iterable[Frame]) -> None:
    with open(path, "w", encoding="utf-8") as out:
        out.write(dumps_record(header_to_record(header)) + "\n")
        for frame in frames:
            out.write(dumps_record(frame_to_record(frame)) + "\n")


# ---------------------------------------------------------------------------
# recorded classifier scores

def _parse_scores(raw, size: int, name: str, path, line_no) -> tuple[float, ...]:
    if not (isinstance(raw, list) and len(raw) == size):
        raise StreamParseError(f"{name} is not a {size}-element array", path=path, line_no=line_no)
    scores = tuple(_number(v, name, path, line_no) for v in raw)
    if any(s < 0 for s in scores):
        raise BadDistributionError(f"{name} has a negative entry", path=path, line_no=line_no)
    if abs(sum(scores) - 1.0) > 1e-6:
        raise BadDistributionError(f"{name} sums to {sum(scores):g}, not 1",
                                   path=path, line_no=line_no)
    return scores


def read_recorded_scores(source) -> dict[tuple[int, str], RecordedScoresEntry]:
    """Load the score lookup; duplicate (frame_id, face_id) keys are fatal."""
    stream, path, owns = _open(source)
    table: dict[tuple[int, str], RecordedScoresEntry] = {}
    try:
        for line_no, record in iter_records(stream, path):
            frame_id = _get(record, "frame_id", path, line_no)
            if not isinstance(frame_id, int) or isinstance(frame_id, bool):
                raise StreamParseError("frame_id is not an integer", path=path, line_no=line_no)
            face_id = str(_get(record, "face_id", path, line_no))
            key = (frame_id, face_id)
            if key in table:
                raise DuplicateKeyError(f"duplicate scores for frame {frame_id}, "
                                        f"face {face_id!r}", path=path, line_no=line_no)
            table[key] = RecordedScoresEntry(
                frame_id=frame_id, face_id=face_id,
                mask_scores=_parse_scores(_get(record, "mask_scores", path, line_no),
                                          3, "mask_scores", path, line_no),
                hand_scores=_parse_scores(_get(record, "hand_scores", path, line_no),
                                          2, "hand_scores", path, line_no),
            )
    finally:
        if owns:
            stream.close()
    return table


def write_recorded_scores(path, entries: Iterable[RecordedScoresEntry]) -> None:
    with open(path, "w", encoding="utf-8") as out:
        for e in entries:
            out.write(dumps_record({"frame_id": e.frame_id, "face_id": e.face_id,
                                    "mask_scores": list(e.mask_scores),
                                    "hand_scores": list(e.hand_scores)}) + "\n")


# ---------------------------------------------------------------------------
# ground truth

def _parse_label(raw, table: dict, name: str, path, line_no):
    if raw is None:
        return None
    if raw not in table:
        raise UnknownLabelError(f"unknown {name} label {raw!r}", path=path, line_no=line_no)
    return table[raw]


def read_ground_truth(source) -> tuple[str, list[GroundTruthFrame]]:
    """Parse annotations; returns (video_id, frames). Unknown label strings
    are rejected, absent labels simply stay unannotated."""
    stream, path, owns = _open(source)
    frames: list[GroundTruthFrame] = []
    try:
        records = iter_records(stream, path)
        try:
            line_no, record = next(records)
        except StopIteration:
            raise StreamParseError("empty ground-truth file", path=path)
        if record.get("kind") != "ground_truth_header":
            raise StreamParseError("first record must be a 'ground_truth_header'",
                                   path=path, line_no=line_no)
        if record.get("format_version") != FORMAT_VERSION:
            raise VersionError(f"unsupported format_version {record.get('format_version')}",
                               path=path, line_no=line_no)
        video_id = str(_get(record, "video_id", path, line_no))
        for line_no, record in records:
            frame_id = _get(record, "frame_id", path, line_no)
            if not isinstance(frame_id, int) or isinstance(frame_id, bool):
                raise StreamParseError("frame_id is not an integer", path=path, line_no=line_no)
            subjects = []
            for raw in record.get("subjects", []):
                distance = raw.get("distance")
                if distance is not None and distance not in _DISTANCE_NAMES:
                    raise UnknownLabelError(f"unknown distance label {distance!r}",
                                            path=path, line_no=line_no)
                box = None
                if raw.get("box") is not None:
                    b = raw["box"]
                    if not (isinstance(b, list) and len(b) == 4):
                        raise StreamParseError("box is not a 4-element array",
                                               path=path, line_no=line_no)
                    box = BoundingBox(*(_number(v, "box", path, line_no) for v in b))
                subjects.append(GroundTruthSubject(
                    id=str(_get(raw, "id", path, line_no)),
                    mask=_parse_label(raw.get("mask"), _MASK_BY_NAME, "mask", path, line_no),
                    hand=_parse_label(raw.get("hand"), _HAND_BY_NAME, "hand", path, line_no),
                    distance=distance,
                    box=box,
                ))
            frames.append(GroundTruthFrame(frame_id=frame_id, subjects=tuple(subjects)))
    finally:
        if owns:
            stream.close()
    return video_id, frames


def ground_truth_to_records(video_id: str, frames: Iterable[GroundTruthFrame]) -> Iterator[dict]:
    yield {"kind": "ground_truth_header", "format_version": FORMAT_VERSION,
           "video_id": video_id}
    for frame in frames:
        subjects = []
        for s in frame.subjects:
            raw: dict = {"id": s.id}
            if s.mask is not None:
                raw["mask"] = s.mask.value
            if s.hand is not None:
                raw["hand"] = s.hand.value
            if s.distance is not None:
                raw["distance"] = s.distance
            if s.box is not None:
                raw["box"] = list(s.box.as_tuple())
            subjects.append(raw)
        yield {"kind": "ground_truth_frame", "frame_id": frame.frame_id, "subjects": subjects}


def write_ground_truth(path, video_id: str, frames: Iterable[GroundTruthFrame]) -> None:
    with open(path, "w", encoding="utf-8") as out:
        for record in ground_truth_to_records(video_id, frames):
            out.write(dumps_record(record) + "\n")
