from __future__ import annotations

import random

import pytest

from utiv.dataset.model import Dataset, FrameAnnotation, TextLine
from utiv.detections import (
    DETECT_ONLY,
    HYBRID,
    Detection,
    DetectionSet,
    parse_detections,
    perturb_ground_truth,
    write_detections,
)
from utiv.errors import DetectionFormatError, MixedModeError
from utiv.geometry import Rect, intersect_area, union_area

from .helpers import DETECTION_MALFORMATIONS, random_annotation


def write_lines(tmp_path, lines: list[str]):
    path = tmp_path / "dets.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestParseDetections:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("", encoding="utf-8")
        dets = parse_detections(path)
        assert dets.frames == {}
        assert dets.mode is None

    def test_three_boxes_one_frame(self, tmp_path):
        path = write_lines(
            tmp_path,
            [
                "# detector run 3",
                "vid01 7 text 0.95 10 20 100 30",
                "vid01 7 text 0.80 10 60 100 30",
                "vid01 7 text 0.50 10 100 100 30",
            ],
        )
        dets = parse_detections(path)
        assert dets.mode == DETECT_ONLY
        assert len(dets.frames[("vid01", 7)]) == 3
        assert dets.frames[("vid01", 7)][0] == Detection(Rect(10, 20, 100, 30), "text", 0.95)

    def test_hybrid_mode_inferred(self, tmp_path):
        path = write_lines(
            tmp_path,
            ["vid01 0 urdu 1.0 0 0 10 10", "vid01 1 english 0.7 0 0 10 10"],
        )
        assert parse_detections(path).mode == HYBRID

    def test_round_trip(self, tmp_path):
        dets = DetectionSet(
            frames={
                ("vid01", 3): (Detection(Rect(1, 2, 30, 4), "urdu", 0.75),),
                ("vid02", 0): (Detection(Rect(5, 6, 70, 8), "english", 1.0),),
            },
            mode=HYBRID,
        )
        path = tmp_path / "out.txt"
        write_detections(dets, path)
        assert parse_detections(path) == dets

    @pytest.mark.parametrize("line,error_class_name", DETECTION_MALFORMATIONS)
    def test_malformed_line_rejected(self, tmp_path, line, error_class_name):
        import utiv.errors

        error_class = getattr(utiv.errors, error_class_name)
        path = write_lines(tmp_path, ["vid01 0 text 0.9 0 0 5 5", line])
        with pytest.raises(error_class) as err:
            parse_detections(path)
        assert isinstance(err.value, DetectionFormatError)
        assert err.value.line == 2

    def test_mixed_modes_rejected(self, tmp_path):
        path = write_lines(
            tmp_path,
            ["vid01 0 text 0.9 0 0 5 5", "vid01 0 urdu 0.9 0 0 5 5"],
        )
        with pytest.raises(MixedModeError) as err:
            parse_detections(path)
        assert err.value.line == 2


def small_dataset(seed: int = 0, frames: int = 4, margin: int = 12) -> Dataset:
    rng = random.Random(seed)
    annotations = tuple(
        random_annotation(rng, frame_number=i, min_lines=1, max_lines=4, margin=margin)
        for i in range(frames)
    )
    return Dataset(annotations)


class TestPerturbGroundTruth:
    def test_exact_copies_geometry(self):
        ds = small_dataset()
        dets = perturb_ground_truth(ds, "exact", seed=1)
        for fa in ds.frames:
            assert [d.box for d in dets.frames[fa.key]] == [line.box for line in fa.lines]
            assert all(d.score == 1.0 and d.label == "text" for d in dets.frames[fa.key])
        assert dets.mode == DETECT_ONLY

    def test_hybrid_labels_copy_scripts(self):
        ds = small_dataset(1)
        dets = perturb_ground_truth(ds, "exact", hybrid=True)
        for fa in ds.frames:
            assert [d.label for d in dets.frames[fa.key]] == [line.script for line in fa.lines]
        assert dets.mode == HYBRID

    def test_deterministic_given_seed(self):
        ds = small_dataset(2)
        a = perturb_ground_truth(ds, "shift", magnitude=5, seed=7)
        b = perturb_ground_truth(ds, "shift", magnitude=5, seed=7)
        c = perturb_ground_truth(ds, "shift", magnitude=5, seed=8)
        assert a == b
        assert a != c

    def test_dilate_supersets(self):
        ds = small_dataset(3)
        dets = perturb_ground_truth(ds, "dilate", magnitude=4)
        for fa in ds.frames:
            for d, line in zip(dets.frames[fa.key], fa.lines):
                assert intersect_area(d.box, line.box) == line.box.area  # contains original
                assert d.box.x2 <= fa.width and d.box.y2 <= fa.height

    def test_dilate_monotone_in_magnitude(self):
        ds = small_dataset(4)
        areas = []
        for magnitude in (1, 3, 6):
            dets = perturb_ground_truth(ds, "dilate", magnitude=magnitude)
            areas.append(sum(union_area([d.box for d in v]) for v in dets.frames.values()))
        assert areas == sorted(areas)

    def test_erode_subsets(self):
        ds = small_dataset(5)
        dets = perturb_ground_truth(ds, "erode", magnitude=2)
        by_key = ds.by_key()
        for key, frame_dets in dets.frames.items():
            gt_boxes = [line.box for line in by_key[key].lines]
            for d in frame_dets:
                assert any(intersect_area(d.box, g) == d.box.area for g in gt_boxes)

    def test_erode_warns_on_swallowed_boxes(self, caplog):
        fa = FrameAnnotation("c", "v", 0, 100, 100, (TextLine(Rect(10, 10, 5, 5), "urdu", "t"),))
        with caplog.at_level("WARNING"):
            dets = perturb_ground_truth(Dataset((fa,)), "erode", magnitude=3)
        assert dets.frames[("v", 0)] == ()
        assert "swallows" in caplog.text

    def test_drop_probability_extremes(self):
        ds = small_dataset(6)
        all_kept = perturb_ground_truth(ds, "drop", magnitude=0.0, seed=1)
        none_kept = perturb_ground_truth(ds, "drop", magnitude=1.0, seed=1)
        assert all_kept.total() == ds.total_lines
        assert none_kept.total() == 0

    def test_spurious_boxes_avoid_ground_truth(self):
        ds = small_dataset(7)
        dets = perturb_ground_truth(ds, "spurious", magnitude=5, seed=3)
        by_key = ds.by_key()
        for key, frame_dets in dets.frames.items():
            gt_boxes = [line.box for line in by_key[key].lines]
            extras = [d.box for d in frame_dets if d.box not in gt_boxes]
            assert len(extras) == 5
            for box in extras:
                assert all(intersect_area(box, g) == 0 for g in gt_boxes)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            perturb_ground_truth(small_dataset(), "melt", magnitude=1)

    def test_bad_magnitudes_rejected(self):
        ds = small_dataset()
        with pytest.raises(ValueError):
            perturb_ground_truth(ds, "drop", magnitude=1.5)
        with pytest.raises(ValueError):
            perturb_ground_truth(ds, "dilate", magnitude=-1)
        with pytest.raises(ValueError):
            perturb_ground_truth(ds, "shift", magnitude=2.5)
