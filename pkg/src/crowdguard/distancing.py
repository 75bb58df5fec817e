"""Social-distance geometry.

Per pair of detected persons: the distance between the midpoints of their
shoulder segments is compared against an adaptive threshold, lambda times the
mean of the two shoulder widths. A pair violates distance iff the distance is
strictly below the threshold; the tie goes to "keeps".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateWidthError, MissingShouldersError
from .model import Frame, PersonDetection, Point2D


@dataclass(frozen=True)
class DistancingConfig:
    """lambda_coefficient scales mean shoulder width into the compliance
    threshold (default 3: ~45 cm shoulders vs ~1.5 m distance).
    min_shoulder_width guards against collapsed poses; pairs involving a
    person below it are not assessed."""

    lambda_coefficient: float = 3.0
    min_shoulder_width: float = 1.0

    def __post_init__(self) -> None:
        if self.lambda_coefficient <= 0:
            raise ValueError("lambda_coefficient must be positive")
        if self.min_shoulder_width <= 0:
            raise ValueError("min_shoulder_width must be positive")


class DistanceStatus(Enum):
    KEEPS = "keeps"
    VIOLATES = "violates"
    UNASSESSED = "unassessed"


@dataclass(frozen=True)
class PairAssessment:
    """Distance decision for one unordered person pair.

    person_a < person_b lexicographically (canonical ordering); violation is
    always distance < threshold.
    """

    person_a: str
    person_b: str
    distance: float
    threshold: float
    violation: bool


@dataclass(frozen=True)
class SubjectDistanceStatus:
    person_id: str
    status: DistanceStatus
    reason: str | None = None


def shoulder_center(person: PersonDetection) -> Point2D:
    """Midpoint of the shoulder segment, the body center proxy."""
    if not person.has_shoulders:
        raise MissingShouldersError(f"person {person.id!r} has no shoulder keypoints")
    ls, rs = person.left_shoulder, person.right_shoulder
    return Point2D((ls.x + rs.x) / 2.0, (ls.y + rs.y) / 2.0)


def shoulder_width(person: PersonDetection) -> float:
    """Euclidean length of the shoulder segment, the body width proxy."""
    if not person.has_shoulders:
        raise MissingShouldersError(f"person {person.id!r} has no shoulder keypoints")
    ls, rs = person.left_shoulder, person.right_shoulder
    return math.hypot(ls.x - rs.x, ls.y - rs.y)


def pair_distance(a: PersonDetection, b: PersonDetection) -> float:
    ca = shoulder_center(a)
    cb = shoulder_center(b)
    return math.hypot(ca.x - cb.x, ca.y - cb.y)


def pair_threshold(a: PersonDetection, b: PersonDetection,
                   config: DistancingConfig = DistancingConfig()) -> float:
    wa = shoulder_width(a)
    wb = shoulder_width(b)
    for person, width in ((a, wa), (b, wb)):
        if width < config.min_shoulder_width:
            raise DegenerateWidthError(
                f"person {person.id!r} shoulder width {width:g} below minimum "
                f"{config.min_shoulder_width:g}")
    return config.lambda_coefficient * (wa + wb) / 2.0


def assess_pair(a: PersonDetection, b: PersonDetection,
                config: DistancingConfig = DistancingConfig()) -> PairAssessment:
    """Decide one pair. Distance exactly equal to the threshold is compliant."""
    distance = pair_distance(a, b)
    threshold = pair_threshold(a, b, config)
    first, second = sorted((a.id, b.id))
    return PairAssessment(person_a=first, person_b=second,
                          distance=distance, threshold=threshold,
                          violation=distance < threshold)


def assess_frame(frame: Frame, config: DistancingConfig = DistancingConfig(),
                 ) -> tuple[list[PairAssessment], list[SubjectDistanceStatus]]:
    """Assess every unordered pair of assessable persons in the frame.

    A person is assessable when both shoulders are present and the shoulder
    width clears the minimum. Non-assessable persons (and a lone assessable
    one) are reported Unassessed with a reason instead of failing the frame.
    """
    assessable: list[PersonDetection] = []
    reasons: dict[str, str] = {}
    for person in frame.persons:
        if not person.has_shoulders:
            reasons[person.id] = "missing shoulders"
        elif shoulder_width(person) < config.min_shoulder_width:
            reasons[person.id] = "degenerate shoulder width"
        else:
            assessable.append(person)
    if len(assessable) == 1:
        reasons[assessable[0].id] = "no other assessable person"
        assessable = []

    pairs: list[PairAssessment] = []
    violators: set[str] = set()
    for i in range(len(assessable)):
        for j in range(i + 1, len(assessable)):
            assessment = assess_pair(assessable[i], assessable[j], config)
            pairs.append(assessment)
            if assessment.violation:
                violators.add(assessment.person_a)
                violators.add(assessment.person_b)

    statuses: list[SubjectDistanceStatus] = []
    for person in frame.persons:
        if person.id in reasons:
            statuses.append(SubjectDistanceStatus(person.id, DistanceStatus.UNASSESSED,
                                                  reasons[person.id]))
        elif person.id in violators:
            statuses.append(SubjectDistanceStatus(person.id, DistanceStatus.VIOLATES))
        else:
            statuses.append(SubjectDistanceStatus(person.id, DistanceStatus.KEEPS))
    return pairs, statuses
