"""Face branch: margin-expanded cropping and mask / face-hand classification.

Classification runs behind a backend contract. The Recorded backend replays
score vectors from a file (deterministic, model-free); the interchange-model
backend runs a portable neural-network model file when a runtime is installed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, Sequence

from .errors import BackendUnavailableError, MissingScoreError
from .model import BoundingBox, FaceDetection, Frame, HandLabel, ImageGeometry, MaskLabel

SUPPORTED_INPUT_EDGES = (224, 240, 256, 260, 299, 300)

DEFAULT_MASK_ORDER: tuple[MaskLabel, ...] = (
    MaskLabel.NO_MASK, MaskLabel.MASK, MaskLabel.IMPROPER_MASK)
DEFAULT_HAND_ORDER: tuple[HandLabel, ...] = (
    HandLabel.INTERACTION, HandLabel.NO_INTERACTION)


@dataclass(frozen=True)
class CropConfig:
    """Per-side margin relative to the box's own dimension: left/right expand
    by margin*width, top/bottom by margin*height."""

    margin_fraction: float = 0.20
    clamp_to_image: bool = True

    def __post_init__(self) -> None:
        if self.margin_fraction < 0:
            raise ValueError("margin_fraction must be >= 0")


class BackendKind(Enum):
    RECORDED = "recorded"
    INTERCHANGE_MODEL = "interchange_model"


@dataclass(frozen=True)
class ClassifierBackendDescriptor:
    kind: BackendKind
    input_edge: int
    class_order: tuple

    def __post_init__(self) -> None:
        if self.input_edge not in SUPPORTED_INPUT_EDGES:
            raise ValueError(f"unsupported input edge {self.input_edge}")


@dataclass(frozen=True)
class FaceCropRef:
    """Handle passed to classifier backends: identity plus the crop region.

    `image` (a PIL image or None) is only needed by pixel-consuming backends.
    """

    frame_id: int
    face_id: str
    crop_box: BoundingBox
    image: object | None = None


@dataclass(frozen=True)
class FaceAssessment:
    face_id: str
    crop_box: BoundingBox
    mask_label: MaskLabel
    mask_scores: tuple[float, float, float]
    hand_label: HandLabel
    hand_scores: tuple[float, float]


class ScoreBackend(Protocol):
    """Classifier backend contract. Score vectors follow the descriptor's
    class_order. Implementations state concurrency support; the Recorded
    backend is safe for concurrent calls."""

    descriptor: ClassifierBackendDescriptor

    def scores(self, ref: FaceCropRef) -> tuple[float, ...]: ...


def expand_crop(box: BoundingBox, geometry: ImageGeometry,
                config: CropConfig = CropConfig()) -> BoundingBox:
    """Push each side outward by the margin, optionally clamped to the image.

    The result always contains the input box (clamping can only trim the
    added margin because the input lies inside the image).
    """
    dx = config.margin_fraction * box.width
    dy = config.margin_fraction * box.height
    x_min, y_min = box.x_min - dx, box.y_min - dy
    x_max, y_max = box.x_max + dx, box.y_max + dy
    if config.clamp_to_image:
        x_min = max(0.0, x_min)
        y_min = max(0.0, y_min)
        x_max = min(float(geometry.width), x_max)
        y_max = min(float(geometry.height), y_max)
    return BoundingBox(x_min, y_min, x_max, y_max)


def rasterize_crop(box: BoundingBox) -> tuple[int, int, int, int]:
    """Round a fractional crop outward to whole pixels (floor mins, ceil
    maxes) so no annotated pixel is lost."""
    return (math.floor(box.x_min), math.floor(box.y_min),
            math.ceil(box.x_max), math.ceil(box.y_max))


def _validate_distribution(scores: Sequence[float], size: int) -> None:
    if len(scores) != size:
        raise ValueError(f"expected {size} scores, got {len(scores)}")
    if any(s < 0 for s in scores):
        raise ValueError(f"negative score in {tuple(scores)}")
    if abs(sum(scores) - 1.0) > 1e-6:
        raise ValueError(f"scores {tuple(scores)} do not sum to 1")


def _argmax_first(scores: Sequence[float]) -> int:
    # first occurrence wins, which realizes the class-order tie rule
    best = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[best]:
            best = i
    return best


def classify_mask(ref: FaceCropRef, backend: ScoreBackend,
                  ) -> tuple[MaskLabel, tuple[float, float, float]]:
    """Three-class mask decision; ties resolved by class-order position."""
    order = backend.descriptor.class_order
    scores = tuple(backend.scores(ref))
    _validate_distribution(scores, 3)
    label = order[_argmax_first(scores)]
    return label, scores


def classify_hand(ref: FaceCropRef, backend: ScoreBackend,
                  ) -> tuple[HandLabel, tuple[float, float]]:
    """Two-class face-hand interaction decision, same tie rule."""
    order = backend.descriptor.class_order
    scores = tuple(backend.scores(ref))
    _validate_distribution(scores, 2)
    label = order[_argmax_first(scores)]
    return label, scores


def _canonical(scores: Sequence[float], order: Sequence, canonical: Sequence) -> tuple:
    if order == canonical:
        return tuple(scores)
    by_label = dict(zip(order, scores))
    return tuple(by_label[label] for label in canonical)


def assess_faces(frame: Frame, crop_config: CropConfig,
                 mask_backend: ScoreBackend, hand_backend: ScoreBackend,
                 image: object | None = None,
                 ) -> tuple[list[FaceAssessment], list[str]]:
    """Assess every face in the frame independently of the person branch.

    Both classifiers see the same margin-expanded crop. Per-face failures are
    collected as warnings, never fatal to the frame; stored score vectors are
    reordered to the canonical taxonomy order.
    """
    assessments: list[FaceAssessment] = []
    warnings: list[str] = []
    for face in frame.faces:
        crop = expand_crop(face.box, frame.geometry, crop_config)
        ref = FaceCropRef(frame.frame_id, face.id, crop, image)
        try:
            mask_label, mask_scores = classify_mask(ref, mask_backend)
            hand_label, hand_scores = classify_hand(ref, hand_backend)
        except (MissingScoreError, BackendUnavailableError, ValueError) as exc:
            warnings.append(f"face {face.id!r}: {exc}")
            continue
        assessments.append(FaceAssessment(
            face_id=face.id,
            crop_box=crop,
            mask_label=mask_label,
            mask_scores=_canonical(mask_scores, mask_backend.descriptor.class_order,
                                   DEFAULT_MASK_ORDER),
            hand_label=hand_label,
            hand_scores=_canonical(hand_scores, hand_backend.descriptor.class_order,
                                   DEFAULT_HAND_ORDER),
        ))
    return assessments, warnings


@dataclass(frozen=True)
class RecordedBackend:
    """Replays serialized score vectors keyed by (frame_id, face_id).

    Safe for concurrent invocation (read-only lookup).
    """

    descriptor: ClassifierBackendDescriptor
    table: dict
    task: str  # "mask" or "hand"

    def scores(self, ref: FaceCropRef) -> tuple[float, ...]:
        entry = self.table.get((ref.frame_id, ref.face_id))
        if entry is None:
            raise MissingScoreError(
                f"no recorded scores for frame {ref.frame_id}, face {ref.face_id!r}")
        return entry.mask_scores if self.task == "mask" else entry.hand_scores


def recorded_backends(table: dict,
                      mask_order: tuple = DEFAULT_MASK_ORDER,
                      hand_order: tuple = DEFAULT_HAND_ORDER,
                      ) -> tuple[RecordedBackend, RecordedBackend]:
    """Build the (mask, hand) backend pair over one recorded-scores table."""
    mask = RecordedBackend(
        ClassifierBackendDescriptor(BackendKind.RECORDED, 224, tuple(mask_order)),
        table, "mask")
    hand = RecordedBackend(
        ClassifierBackendDescriptor(BackendKind.RECORDED, 224, tuple(hand_order)),
        table, "hand")
    return mask, hand


@dataclass
class InterchangeModelBackend:
    """Runs a model stored in the portable ONNX interchange format.

    Crops are rasterized, resized to input_edge x input_edge with bilinear
    interpolation (no aspect preservation), scaled to [0,1], and fed NCHW.
    Requires the optional onnxruntime dependency; raises
    BackendUnavailableError when it is not installed. Not safe for concurrent
    invocation (a single inference session is reused).
    """

    descriptor: ClassifierBackendDescriptor
    model_path: str
    _session: object = field(default=None, repr=False)

    def _ensure_session(self):
        if self._session is None:
            try:
                import onnxruntime  # noqa: PLC0415
            except ImportError as exc:
                raise BackendUnavailableError(
                    "onnxruntime is not installed; install the [onnx] extra "
                    "to use interchange-model backends") from exc
            try:
                self._session = onnxruntime.InferenceSession(self.model_path)
            except Exception as exc:
                raise BackendUnavailableError(
                    f"cannot load model {self.model_path!r}: {exc}") from exc
        return self._session

    def scores(self, ref: FaceCropRef) -> tuple[float, ...]:
        import numpy as np  # noqa: PLC0415

        session = self._ensure_session()
        if ref.image is None:
            raise BackendUnavailableError(
                f"frame {ref.frame_id} has no pixel payload for model inference")
        left, top, right, bottom = rasterize_crop(ref.crop_box)
        edge = self.descriptor.input_edge
        from PIL import Image  # noqa: PLC0415
        crop = ref.image.crop((left, top, right, bottom)).convert("RGB")
        crop = crop.resize((edge, edge), Image.BILINEAR)
        arr = np.asarray(crop, dtype=np.float32) / 255.0
        arr = arr.transpose(2, 0, 1)[None, ...]
        name = session.get_inputs()[0].name
        raw = session.run(None, {name: arr})[0].reshape(-1).astype(float)
        if raw.min() < 0 or abs(raw.sum() - 1.0) > 1e-6:
            # model emits logits; normalize to a distribution
            raw = np.exp(raw - raw.max())
            raw = raw / raw.sum()
        return tuple(float(v) for v in raw)
