"""Shared domain types: geometry, detections, label taxonomies, frames.

All types are frozen value objects; once constructed they are safe to share
between workers. Coordinates use the image convention: origin at the top-left
corner, x grows rightward, y grows downward, units are pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


@dataclass(frozen=True)
class ImageGeometry:
    """Pixel dimensions of a frame."""

    width: int
    height: int


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box with real-valued corners, x_min <= x_max, y_min <= y_max."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.x_min, self.y_min, self.x_max, self.y_max


class MaskLabel(Enum):
    NO_MASK = "no_mask"
    MASK = "mask"
    IMPROPER_MASK = "improper_mask"


class HandLabel(Enum):
    INTERACTION = "interaction"
    NO_INTERACTION = "no_interaction"


@dataclass(frozen=True)
class PersonDetection:
    """Detected person: bounding box plus the two shoulder keypoints.

    A person carries either both shoulders or none; distancing skips persons
    without them.
    """

    id: str
    box: BoundingBox
    left_shoulder: Point2D | None = None
    right_shoulder: Point2D | None = None
    confidence: float = 1.0

    @property
    def has_shoulders(self) -> bool:
        return self.left_shoulder is not None and self.right_shoulder is not None


@dataclass(frozen=True)
class FaceDetection:
    id: str
    box: BoundingBox
    confidence: float = 1.0
    person_id: str | None = None


@dataclass(frozen=True)
class Frame:
    """One video frame's detections. `image_path` is an optional pointer to the
    raster payload, used only for cropping and rendering."""

    frame_id: int
    geometry: ImageGeometry
    persons: tuple[PersonDetection, ...] = ()
    faces: tuple[FaceDetection, ...] = ()
    image_path: str | None = None


def _check_box(box: BoundingBox, geometry: ImageGeometry, owner: str, out: list[str]) -> None:
    for name, value in (("x_min", box.x_min), ("y_min", box.y_min),
                        ("x_max", box.x_max), ("y_max", box.y_max)):
        if not math.isfinite(value):
            out.append(f"non-finite {name} for {owner}")
            return
    if box.x_min > box.x_max:
        out.append(f"x_min>x_max for {owner}")
    if box.y_min > box.y_max:
        out.append(f"y_min>y_max for {owner}")
    if box.x_min < 0 or box.y_min < 0 or box.x_max > geometry.width or box.y_max > geometry.height:
        out.append(f"box out of image bounds for {owner}")


def _check_point(point: Point2D, geometry: ImageGeometry, owner: str, out: list[str]) -> None:
    if not (math.isfinite(point.x) and math.isfinite(point.y)):
        out.append(f"non-finite point for {owner}")
        return
    if not (0 <= point.x <= geometry.width and 0 <= point.y <= geometry.height):
        out.append(f"point out of image bounds for {owner}")


def validate_frame(frame: Frame) -> list[str]:
    """Return a description of every invariant violation; empty means valid.

    Total function: never raises, every problem is reported as a string naming
    the offending field.
    """
    out: list[str] = []
    geometry = frame.geometry
    if geometry.width < 1 or geometry.height < 1:
        out.append(f"non-positive geometry {geometry.width}x{geometry.height}")
        return out

    ids: list[str] = []
    for person in frame.persons:
        owner = f"person {person.id!r}"
        ids.append(person.id)
        _check_box(person.box, geometry, owner, out)
        if (person.left_shoulder is None) != (person.right_shoulder is None):
            out.append(f"unpaired shoulder for {owner}")
        for shoulder in (person.left_shoulder, person.right_shoulder):
            if shoulder is not None:
                _check_point(shoulder, geometry, owner, out)
        if not (0.0 <= person.confidence <= 1.0):
            out.append(f"confidence out of [0,1] for {owner}")
    for face in frame.faces:
        owner = f"face {face.id!r}"
        ids.append(face.id)
        _check_box(face.box, geometry, owner, out)
        if not (0.0 <= face.confidence <= 1.0):
            out.append(f"confidence out of [0,1] for {owner}")
        if face.person_id is not None and face.person_id not in {p.id for p in frame.persons}:
            out.append(f"dangling person_id {face.person_id!r} for {owner}")
    if len(set(ids)) != len(ids):
        seen: set[str] = set()
        dupes = sorted({i for i in ids if i in seen or seen.add(i)})
        out.append(f"duplicate subject ids {dupes} in frame {frame.frame_id}")
    return out
