"""Command-line entry point.

Subcommands wire the library into the four workflows: `run` the engine over a
detection stream, `evaluate` reports against ground truth, `render` overlays,
and `validate` any artifact file.

Exit codes: 0 success, 1 validation/evaluation/runtime failure, 2 usage error.
Per-entity problems (a face without scores, a person without shoulders) are
warnings inside reports, never fatal to a run.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .config import ConfigError, EngineConfig, load_config
from .errors import CrowdguardError, FormatError
from .evaluation import evaluate_videos, format_table, table_to_record
from .faces import (BackendKind, ClassifierBackendDescriptor, InterchangeModelBackend,
                    recorded_backends)
from .formats import (read_detection_stream, read_ground_truth, read_recorded_scores)
from .overlay import OverlayStyle, emit_overlay_commands, render_frame, write_commands
from .pipeline import process_frame
from .report import read_report, summarize_video, write_report, write_summary

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def _apply_overrides(config: EngineConfig, args) -> EngineConfig:
    from dataclasses import replace
    if getattr(args, "lambda_", None) is not None:
        config = replace(config, lambda_coefficient=args.lambda_)
    if getattr(args, "margin", None) is not None:
        config = replace(config, margin_fraction=args.margin)
    if getattr(args, "iou", None) is not None:
        config = replace(config, iou_threshold=args.iou)
    if getattr(args, "match_mode", None) is not None:
        config = replace(config, match_mode=args.match_mode)
    return config


def _find_image(images_dir: Path, frame_id: int) -> Path | None:
    for stem in (str(frame_id), f"{frame_id:06d}", f"frame_{frame_id:06d}"):
        for suffix in IMAGE_SUFFIXES:
            candidate = images_dir / (stem + suffix)
            if candidate.exists():
                return candidate
    return None


def cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    reader = read_detection_stream(args.detections)

    if args.mask_model or args.hand_model:
        if not (args.mask_model and args.hand_model):
            print("error: --mask-model and --hand-model must be given together",
                  file=sys.stderr)
            return 2
        descriptor = ClassifierBackendDescriptor(
            BackendKind.INTERCHANGE_MODEL, config.input_edge, config.mask_class_order)
        mask_backend = InterchangeModelBackend(descriptor, args.mask_model)
        hand_descriptor = ClassifierBackendDescriptor(
            BackendKind.INTERCHANGE_MODEL, config.input_edge, config.hand_class_order)
        hand_backend = InterchangeModelBackend(hand_descriptor, args.hand_model)
    else:
        if args.scores is None:
            print("error: provide --scores (recorded backend) or --mask-model/"
                  "--hand-model", file=sys.stderr)
            return 2
        table = read_recorded_scores(args.scores)
        mask_backend, hand_backend = recorded_backends(
            table, config.mask_class_order, config.hand_class_order)

    images_dir = Path(args.images) if args.images else None

    def load_image(frame):
        if images_dir is None:
            return None
        path = _find_image(images_dir, frame.frame_id)
        if path is None:
            return None
        from PIL import Image
        return Image.open(path)

    start = time.perf_counter()
    reports = []
    for frame in reader:
        reports.append(process_frame(frame, config, mask_backend, hand_backend,
                                     image=load_image(frame)))
    elapsed = time.perf_counter() - start

    write_report(args.out, reader.header, reports)
    summary = summarize_video(reader.header.video_id, reports, elapsed)
    summary_path = args.summary or (args.out + ".summary.json")
    write_summary(summary_path, summary)

    for warning in reader.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"{summary.frame_count} frames -> {args.out} "
          f"({summary.violating_pairs} violating pairs)")
    return 0


def cmd_evaluate(args) -> int:
    if len(args.report) != len(args.ground_truth):
        print("error: need one --ground-truth per --report", file=sys.stderr)
        return 2
    config = _apply_overrides(load_config(args.config), args)
    items = []
    for report_path, gt_path in zip(args.report, args.ground_truth):
        header, reports = read_report(report_path)
        gt_video_id, gt_frames = read_ground_truth(gt_path)
        if header.video_id != gt_video_id:
            print(f"error: report is for video {header.video_id!r} but ground "
                  f"truth is for {gt_video_id!r}", file=sys.stderr)
            return 1
        items.append((header.video_id, reports, gt_frames))
    table = evaluate_videos(items, config.matching())
    print(format_table(table))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as out:
            json.dump(table_to_record(table), out, sort_keys=True, indent=2)
            out.write("\n")
    return 0


def cmd_render(args) -> int:
    header, reports = read_report(args.report)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    style = OverlayStyle()
    images_dir = Path(args.images) if args.images else None
    if not args.commands_only and images_dir is None:
        print("error: --images is required unless --commands-only", file=sys.stderr)
        return 2
    for report in reports:
        commands = emit_overlay_commands(report, style)
        write_commands(out_dir / f"frame_{report.frame_id:06d}.commands.jsonl",
                       report.frame_id, commands)
        if args.commands_only:
            continue
        image_path = _find_image(images_dir, report.frame_id)
        if image_path is None:
            print(f"error: no image found for frame {report.frame_id} in "
                  f"{images_dir}", file=sys.stderr)
            return 1
        from PIL import Image
        with Image.open(image_path) as image:
            annotated = render_frame(image, report, style, geometry=header.geometry)
        annotated.save(out_dir / f"frame_{report.frame_id:06d}.png")
    print(f"rendered {len(reports)} frames -> {out_dir}")
    return 0


def _sniff_kind(path: str) -> str:
    with open(path, "r", encoding="utf-8") as stream:
        for line in stream:
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                return "detections"  # let the stream parser produce the error
            kind = record.get("kind")
            if kind == "header":
                return "detections"
            if kind == "report_header":
                return "report"
            if kind == "ground_truth_header":
                return "ground_truth"
            if "mask_scores" in record:
                return "scores"
            return "detections"
    return "detections"


def cmd_validate(args) -> int:
    kind = args.kind or _sniff_kind(args.file)
    warnings: list[str] = []
    try:
        if kind == "detections":
            reader = read_detection_stream(args.file)
            count = sum(1 for _ in reader)
            warnings = reader.warnings
            print(f"ok: detection stream, {count} frames")
        elif kind == "scores":
            table = read_recorded_scores(args.file)
            print(f"ok: recorded scores, {len(table)} entries")
        elif kind == "ground_truth":
            video_id, frames = read_ground_truth(args.file)
            print(f"ok: ground truth for video {video_id!r}, {len(frames)} frames")
        else:
            header, reports = read_report(args.file)
            print(f"ok: report for video {header.video_id!r}, {len(reports)} frames")
    except (FormatError, OSError) as exc:
        print(f"finding: {exc}", file=sys.stderr)
        return 1
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowdguard",
        description="Compliance engine: mask, face-hand and social distance "
                    "decisions from per-frame detections.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="process a detection stream into reports")
    run.add_argument("--detections", required=True)
    run.add_argument("--scores", help="recorded classifier scores (Recorded backend)")
    run.add_argument("--mask-model", help="mask model file (interchange backend)")
    run.add_argument("--hand-model", help="face-hand model file (interchange backend)")
    run.add_argument("--images", help="frame image directory (interchange backend)")
    run.add_argument("--config")
    run.add_argument("--lambda", dest="lambda_", type=float,
                     help="distance threshold coefficient")
    run.add_argument("--margin", type=float, help="face crop margin per side")
    run.add_argument("--out", required=True, help="report output path")
    run.add_argument("--summary", help="summary output path "
                                       "(default: <out>.summary.json)")
    run.set_defaults(func=cmd_run)

    ev = sub.add_parser("evaluate", help="score reports against ground truth")
    ev.add_argument("--report", action="append", required=True)
    ev.add_argument("--ground-truth", action="append", required=True)
    ev.add_argument("--config")
    ev.add_argument("--iou", type=float, help="IoU matching threshold")
    ev.add_argument("--match-mode", choices=["by_id", "by_iou"])
    ev.add_argument("--out", help="write the table as JSON here")
    ev.set_defaults(func=cmd_evaluate)

    render = sub.add_parser("render", help="draw report decisions onto frame images")
    render.add_argument("--report", required=True)
    render.add_argument("--images", help="frame image directory")
    render.add_argument("--out-dir", required=True)
    render.add_argument("--commands-only", action="store_true",
                        help="emit draw-command files only, no raster output")
    render.set_defaults(func=cmd_render)

    validate = sub.add_parser("validate", help="check any artifact file")
    validate.add_argument("file")
    validate.add_argument("--kind",
                          choices=["detections", "scores", "ground_truth", "report"])
    validate.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except (CrowdguardError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
