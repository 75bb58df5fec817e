"""crowdguard: deterministic compliance engine for mask usage, face-hand
interaction, and social distance, computed from per-frame detections."""

from .distancing import (DistanceStatus, DistancingConfig, PairAssessment,
                         SubjectDistanceStatus, assess_frame, assess_pair,
                         pair_distance, pair_threshold, shoulder_center,
                         shoulder_width)
from .faces import (CropConfig, FaceAssessment, RecordedBackend, assess_faces,
                    classify_hand, classify_mask, expand_crop, recorded_backends)
from .model import (BoundingBox, FaceDetection, Frame, HandLabel, ImageGeometry,
                    MaskLabel, PersonDetection, Point2D, validate_frame)
from .report import FrameReport, VideoSummary, build_frame_report, summarize_video

__version__ = "0.1.0"

__all__ = [
    "BoundingBox", "CropConfig", "DistanceStatus", "DistancingConfig",
    "FaceAssessment", "FaceDetection", "Frame", "FrameReport", "HandLabel",
    "ImageGeometry", "MaskLabel", "PairAssessment", "PersonDetection",
    "Point2D", "RecordedBackend", "SubjectDistanceStatus", "VideoSummary",
    "assess_faces", "assess_frame", "assess_pair", "build_frame_report",
    "classify_hand", "classify_mask", "expand_crop", "pair_distance",
    "pair_threshold", "recorded_backends", "shoulder_center", "shoulder_width",
    "summarize_video", "validate_frame",
]
