"""Glue that runs the face branch and the distance branch over frames and
assembles frame reports; used by the CLI and by throughput tests."""

from __future__ import annotations

import time
from typing import Iterable, Iterator

from .config import EngineConfig
from .distancing import assess_frame
from .faces import ScoreBackend, assess_faces, recorded_backends
from .formats import StreamHeader
from .model import Frame
from .report import FrameReport, VideoSummary, build_frame_report, summarize_video


def process_frame(frame: Frame, config: EngineConfig,
                  mask_backend: ScoreBackend, hand_backend: ScoreBackend,
                  image=None) -> FrameReport:
    """Run both branches on one frame. The branches are independent by
    design: a frame with faces but no persons (or vice versa) still yields
    the assessable half."""
    assessments, warnings = assess_faces(frame, config.crop(),
                                         mask_backend, hand_backend, image=image)
    pairs, statuses = assess_frame(frame, config.distancing())
    return build_frame_report(frame, assessments, warnings, pairs, statuses)


def run_stream(frames: Iterable[Frame], config: EngineConfig,
               mask_backend: ScoreBackend, hand_backend: ScoreBackend,
               load_image=None) -> Iterator[FrameReport]:
    for frame in frames:
        image = load_image(frame) if load_image is not None else None
        yield process_frame(frame, config, mask_backend, hand_backend, image=image)


def run_recorded(frames: Iterable[Frame], config: EngineConfig, score_table: dict,
                 ) -> tuple[list[FrameReport], float]:
    """Run with the Recorded backend; returns reports and elapsed seconds."""
    mask_backend, hand_backend = recorded_backends(
        score_table, config.mask_class_order, config.hand_class_order)
    start = time.perf_counter()
    reports = list(run_stream(frames, config, mask_backend, hand_backend))
    return reports, time.perf_counter() - start


def summarize(header: StreamHeader, reports: list[FrameReport],
              elapsed_seconds: float | None = None) -> VideoSummary:
    return summarize_video(header.video_id, reports, elapsed_seconds)
