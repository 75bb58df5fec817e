import pytest

from crowdguard.config import EngineConfig
from crowdguard.distancing import (DistanceStatus, PairAssessment,
                                   SubjectDistanceStatus, assess_frame)
from crowdguard.errors import IdMismatchError
from crowdguard.faces import FaceAssessment, assess_faces, recorded_backends
from crowdguard.formats import StreamHeader
from crowdguard.model import BoundingBox, HandLabel, MaskLabel, PersonDetection
from crowdguard.pipeline import process_frame
from crowdguard.report import (build_frame_report, read_report, report_to_record,
                               summarize_video, write_report)

from helpers import GEOMETRY, face_at, make_frame, person_at, scores_entry


def _assessment(face_id="f1"):
    return FaceAssessment(face_id=face_id, crop_box=BoundingBox(0, 0, 10, 10),
                          mask_label=MaskLabel.MASK, mask_scores=(0.1, 0.8, 0.1),
                          hand_label=HandLabel.NO_INTERACTION, hand_scores=(0.2, 0.8))


def _full_report(frame_id=0):
    frame = make_frame(frame_id=frame_id,
                       persons=[person_at("pa", (200, 300), 60),
                                person_at("pb", (350, 300), 60)],
                       faces=[face_at("f1", (400, 100, 460, 170)),
                              face_at("f2", (500, 100, 560, 170))])
    mask_b, hand_b = recorded_backends({
        (frame_id, "f1"): scores_entry(frame_id, "f1"),
        (frame_id, "f2"): scores_entry(frame_id, "f2", mask=(0.7, 0.2, 0.1),
                                       hand=(0.8, 0.2))})
    return process_frame(frame, EngineConfig(), mask_b, hand_b)


def test_report_cardinalities():
    report = _full_report()
    assert len(report.faces) == 2
    assert len(report.pairs) == 1
    assert len(report.subjects) == 2


def test_unknown_face_id_rejected():
    frame = make_frame(faces=[face_at("f1", (10, 10, 40, 40))])
    with pytest.raises(IdMismatchError):
        build_frame_report(frame, [_assessment("ghost")], [], [], [])


def test_unknown_person_id_rejected():
    frame = make_frame(persons=[person_at("pa", (200, 300), 60)])
    status = SubjectDistanceStatus("ghost", DistanceStatus.KEEPS)
    with pytest.raises(IdMismatchError):
        build_frame_report(frame, [], [], [], [status])


def test_unknown_pair_id_rejected():
    frame = make_frame(persons=[person_at("pa", (200, 300), 60)])
    pair = PairAssessment("pa", "ghost", 10.0, 20.0, True)
    with pytest.raises(IdMismatchError):
        build_frame_report(frame, [], [], [pair], [])


def test_missing_shoulders_warning():
    bare = PersonDetection(id="bare", box=BoundingBox(0, 0, 50, 50))
    frame = make_frame(persons=[bare])
    pairs, statuses = assess_frame(frame)
    report = build_frame_report(frame, [], [], pairs, statuses)
    assert any("unassessed: missing shoulders" in w for w in report.warnings)


def test_report_assembly_is_deterministic():
    a = report_to_record(_full_report())
    b = report_to_record(_full_report())
    assert a == b


def test_summary_counts():
    reports = [_full_report(i) for i in range(3)]
    summary = summarize_video("v", reports)
    assert summary.frame_count == 3
    assert summary.violating_pairs == 3  # one violating pair per frame
    assert summary.pair_count == 3
    assert summary.mask_counts == {"no_mask": 3, "mask": 3, "improper_mask": 0}
    assert summary.hand_counts == {"interaction": 3, "no_interaction": 3}
    assert summary.distance_counts == {"keeps": 0, "violates": 6, "unassessed": 0}


def test_empty_summary_zeroed():
    summary = summarize_video("v", [])
    assert summary.frame_count == 0
    assert summary.violating_pairs == 0
    assert all(v == 0 for v in summary.mask_counts.values())
    assert summary.fps is None


def test_summary_additivity():
    reports = [_full_report(i) for i in range(5)]
    whole = summarize_video("v", reports)
    first = summarize_video("v", reports[:2])
    second = summarize_video("v", reports[2:])
    assert whole.frame_count == first.frame_count + second.frame_count
    assert whole.violating_pairs == first.violating_pairs + second.violating_pairs
    for key in whole.mask_counts:
        assert whole.mask_counts[key] == first.mask_counts[key] + second.mask_counts[key]
    for key in whole.distance_counts:
        assert whole.distance_counts[key] == (first.distance_counts[key]
                                              + second.distance_counts[key])


def test_report_file_round_trip(tmp_path):
    reports = [_full_report(i) for i in range(3)]
    path = tmp_path / "report.jsonl"
    header = StreamHeader(1, "v", GEOMETRY)
    write_report(path, header, reports)
    parsed_header, parsed = read_report(str(path))
    assert parsed_header.video_id == "v"
    assert parsed == reports
