"""Acceptance suite: one test per exit criterion, each printing a PASS/FAIL
line. Run with `pytest tests/test_acceptance.py -s` to see the lines."""

import json
import math
import random
import time
from contextlib import contextmanager

import pytest

from crowdguard.cli import main
from crowdguard.config import EngineConfig
from crowdguard.distancing import (DistancingConfig, assess_frame, assess_pair)
from crowdguard.evaluation import (MatchingConfig, MatchMode, Task, evaluate_videos)
from crowdguard.faces import CropConfig, expand_crop, recorded_backends
from crowdguard.formats import GroundTruthFrame, GroundTruthSubject
from crowdguard.model import BoundingBox, HandLabel, ImageGeometry, MaskLabel
from crowdguard.pipeline import process_frame
from crowdguard.report import read_report

from helpers import (face_at, make_frame, person_at, random_frame, scores_entry,
                     shoulders_person, write_run_fixture)
from oracle import oracle_accuracy, oracle_assess
from test_evaluation import frame_report, gt_frame, report_face, report_subject


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL: {name}")
        raise
    print(f"ACCEPTANCE PASS: {name}")


def test_oracle_equivalence_1000_frames():
    with criterion("distance-rule oracle equivalence, 1000 random frames in < 5 s"):
        rng = random.Random(20240824)
        start = time.perf_counter()
        for i in range(1000):
            frame = random_frame(rng, frame_id=i, min_persons=2, max_persons=6)
            pairs, _ = assess_frame(frame)
            expected = oracle_assess(frame)
            got = sorted((p.person_a, p.person_b, p.violation) for p in pairs)
            want = sorted((a, b, v) for a, b, _, _, v in expected)
            assert got == want
            for engine_pair, oracle_pair in zip(
                    sorted(pairs, key=lambda p: (p.person_a, p.person_b)),
                    sorted(expected)):
                assert math.isclose(engine_pair.distance, oracle_pair[2],
                                    rel_tol=1e-9, abs_tol=1e-9)
                assert math.isclose(engine_pair.threshold, oracle_pair[3],
                                    rel_tol=1e-9, abs_tol=1e-9)
        assert time.perf_counter() - start < 5.0


def test_worked_example_exact():
    with criterion("worked example: T=150 from widths 40/60, D=100 violates, "
                   "D=T keeps"):
        a = shoulders_person("a", (100, 300), (140, 300))   # width 40
        b = shoulders_person("b", (190, 300), (250, 300))   # width 60
        result = assess_pair(a, b, DistancingConfig(lambda_coefficient=3.0))
        assert result.threshold == 150.0
        assert result.distance == 100.0  # centers at x=120 and x=220
        assert result.violation is True

        # boundary: widths 40/40 -> T=120, centers exactly 120 apart
        c = shoulders_person("c", (100, 100), (140, 100))
        d = shoulders_person("d", (220, 100), (260, 100))
        boundary = assess_pair(c, d)
        assert boundary.distance == boundary.threshold == 120.0
        assert boundary.violation is False


def test_invariance_suite_200_frames():
    with criterion("scale/translation/rotation invariance of violation flags, "
                   "200 random frames"):
        rng = random.Random(99)
        config = DistancingConfig(min_shoulder_width=1e-12)

        def flags(frame):
            return {(p.person_a, p.person_b): p.violation
                    for p in assess_frame(frame, config)[0]}

        def transformed(frame, fn):
            return make_frame(persons=[
                shoulders_person(p.id, fn(p.left_shoulder), fn(p.right_shoulder))
                for p in frame.persons])

        for i in range(200):
            frame = random_frame(rng, frame_id=i)
            baseline = flags(frame)
            for s in (0.1, 1.0, 7.3):
                assert flags(transformed(frame, lambda pt: (pt.x * s, pt.y * s))) \
                    == baseline
            tx, ty = rng.uniform(-200, 200), rng.uniform(-200, 200)
            assert flags(transformed(frame, lambda pt: (pt.x + tx, pt.y + ty))) \
                == baseline
            theta = rng.uniform(0.0, 2.0 * math.pi)
            cos_t, sin_t = math.cos(theta), math.sin(theta)
            assert flags(transformed(
                frame, lambda pt: (pt.x * cos_t - pt.y * sin_t,
                                   pt.x * sin_t + pt.y * cos_t))) == baseline


def test_pair_count_law_0_to_8():
    with criterion("pair-count law k(k-1)/2 for k in 0..8"):
        for k in range(9):
            frame = make_frame(persons=[person_at(f"p{i}", (100 * i + 50, 500), 20)
                                        for i in range(k)])
            pairs, _ = assess_frame(frame)
            assert len(pairs) == k * (k - 1) // 2


def test_crop_arithmetic_exact():
    with criterion("crop arithmetic: margin expansion, border clamp, "
                   "margin-0 identity"):
        geometry = ImageGeometry(1000, 1000)
        out = expand_crop(BoundingBox(100, 100, 200, 200), geometry)
        assert out.as_tuple() == (80.0, 80.0, 220.0, 220.0)
        corner = expand_crop(BoundingBox(0, 0, 100, 100), geometry)
        assert corner.as_tuple() == (0.0, 0.0, 120.0, 120.0)
        box = BoundingBox(12.5, 40.0, 333.25, 444.5)
        assert expand_crop(box, geometry, CropConfig(margin_fraction=0.0)) == box


def _six_video_fixture():
    videos = []
    rng = random.Random(5)
    for v in range(6):
        reports, gts = [], []
        for i in range(8):
            # hand-constructed disagreements: wrong mask on every 3rd frame,
            # wrong hand on every 4th, wrong distance on every 5th
            predicted_mask = MaskLabel.NO_MASK if i % 3 == 0 else MaskLabel.MASK
            predicted_hand = (HandLabel.INTERACTION if i % 4 == 0
                              else HandLabel.NO_INTERACTION)
            from crowdguard.distancing import DistanceStatus
            predicted_status = (DistanceStatus.VIOLATES if i % 5 == 0
                                else DistanceStatus.KEEPS)
            face_box = (10 + v, 10, 60 + v, 60)
            person_box = (200, 100, 260, 380)
            reports.append(frame_report(
                frame_id=i,
                faces=[report_face("f", face_box, mask=predicted_mask,
                                   hand=predicted_hand)],
                subjects=[report_subject("p", person_box, predicted_status)]))
            gts.append(gt_frame(frame_id=i, subjects=[
                GroundTruthSubject(id="f", mask=MaskLabel.MASK,
                                   hand=HandLabel.NO_INTERACTION,
                                   box=BoundingBox(*face_box)),
                GroundTruthSubject(id="p", distance="keeps",
                                   box=BoundingBox(*person_box))]))
        videos.append((f"v{v}", reports, gts))
    return videos


def test_evaluation_protocol_fixture():
    with criterion("evaluation protocol: oracle agreement, ignore-missing rule, "
                   "micro-average totals"):
        videos = _six_video_fixture()
        for config, mode in ((MatchingConfig(), "by_id"),
                             (MatchingConfig(mode=MatchMode.BY_IOU), "by_iou")):
            table = evaluate_videos(videos, config)
            expected = oracle_accuracy(videos, mode=mode)
            for scores in (*table.videos, table.total):
                key = scores.video_id
                for task in Task:
                    acc = scores.accuracies[task]
                    assert (acc.correct, acc.scored) == expected[key][task.value]

        # ignore rule: unmatched annotated subjects change nothing
        padded = []
        for video_id, reports, gts in videos:
            padded_gts = [
                GroundTruthFrame(frame_id=g.frame_id, subjects=g.subjects + (
                    GroundTruthSubject(id=f"ghost{g.frame_id}", mask=MaskLabel.MASK,
                                       distance="keeps",
                                       box=BoundingBox(900, 900, 950, 950)),))
                for g in gts]
            padded.append((video_id, reports, padded_gts))
        for config in (MatchingConfig(), MatchingConfig(mode=MatchMode.BY_IOU)):
            base = evaluate_videos(videos, config)
            with_ghosts = evaluate_videos(padded, config)
            for before, after in zip((*base.videos, base.total),
                                     (*with_ghosts.videos, with_ghosts.total)):
                assert before.accuracies == after.accuracies

        # micro average: pooled (9,10)+(1,10) -> 0.5
        def counted_video(vid, n_correct, n_total):
            reports, gts = [], []
            for i in range(n_total):
                label = MaskLabel.MASK if i < n_correct else MaskLabel.IMPROPER_MASK
                reports.append(frame_report(frame_id=i,
                                            faces=[report_face("f", (0, 0, 10, 10),
                                                               mask=MaskLabel.MASK)]))
                gts.append(gt_frame(frame_id=i,
                                    subjects=[GroundTruthSubject(id="f", mask=label)]))
            return vid, reports, gts

        pooled = evaluate_videos([counted_video("a", 9, 10),
                                  counted_video("b", 1, 10)])
        acc = pooled.total.accuracies[Task.MASK]
        assert (acc.correct, acc.scored, acc.accuracy) == (10, 20, 0.5)


def test_end_to_end_determinism(tmp_path, capsys):
    with criterion("end-to-end determinism: byte-identical reports, identical "
                   "evaluation tables"):
        detections, scores, gt = write_run_fixture(tmp_path)
        outputs = []
        tables = []
        for run in ("one", "two"):
            run_dir = tmp_path / run
            run_dir.mkdir()
            report_path = run_dir / "report.jsonl"
            assert main(["run", "--detections", str(detections),
                         "--scores", str(scores), "--out", str(report_path)]) == 0
            outputs.append(report_path.read_bytes())
            table_path = run_dir / "table.json"
            assert main(["evaluate", "--report", str(report_path),
                         "--ground-truth", str(gt), "--out", str(table_path)]) == 0
            tables.append(json.loads(table_path.read_text()))
        assert outputs[0] == outputs[1]
        assert tables[0] == tables[1]


def test_throughput_recorded_backend():
    with criterion("throughput: >= 10,000 frames/s, Recorded backend, "
                   "no rendering"):
        rng = random.Random(3)
        config = EngineConfig()
        frames = []
        table = {}
        n_frames = 10_000
        for i in range(n_frames):
            base = random_frame(rng, frame_id=i, n_persons=3)
            faces = [face_at(f"f{j}", (50 + 70 * j, 50, 100 + 70 * j, 100))
                     for j in range(2)]
            frames.append(make_frame(frame_id=i, persons=base.persons, faces=faces))
            for j in range(2):
                table[(i, f"f{j}")] = scores_entry(i, f"f{j}")
        mask_backend, hand_backend = recorded_backends(table)
        start = time.perf_counter()
        for frame in frames:
            process_frame(frame, config, mask_backend, hand_backend)
        elapsed = time.perf_counter() - start
        rate = n_frames / elapsed
        print(f"  measured {rate:,.0f} frames/s")
        assert rate >= 10_000
