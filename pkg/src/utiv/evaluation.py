"""Area-based precision/recall/F-measure, script scoring and diagnostics.

The detection metric is area-based: for one frame, precision is the area of
(detected region intersected with ground-truth region) divided by the
detected area, and recall the same numerator divided by the ground-truth
area. Regions are true set unions of boxes, so overlapping boxes are never
double-counted. Multiple frames are micro-aggregated: per-frame area tallies
are summed first and divided once.

The F-measure is the harmonic mean 2PR / (P + R).

A frame set with no detected area at all has precision 1.0 by convention
(there is nothing wrongly claimed); the convention is flagged on the score.
Symmetrically, recall is 1.0 when there is no ground-truth area. Scores are
kept at full precision; ``PRFScore.rounded``/``truncated`` provide the
2- and 3-decimal views used in report tables.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from utiv.dataset.model import Dataset, FrameKey
from utiv.detections import DETECT_ONLY, HYBRID, DetectionSet
from utiv.errors import UndefinedScoreError
from utiv.geometry import Rect, RectRegion, iou, region_intersection_area, union_area

logger = logging.getLogger(__name__)

SCRIPT_ORDER = ("urdu", "english")


@dataclass(frozen=True)
class AreaTally:
    """Additive per-frame area sums in pixels squared."""

    intersection: int = 0
    detected: int = 0
    ground_truth: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.intersection <= min(self.detected, self.ground_truth):
            raise ValueError(
                f"inconsistent tally: intersection={self.intersection}, "
                f"detected={self.detected}, ground_truth={self.ground_truth}"
            )

    def __add__(self, other: "AreaTally") -> "AreaTally":
        return AreaTally(
            self.intersection + other.intersection,
            self.detected + other.detected,
            self.ground_truth + other.ground_truth,
        )


@dataclass(frozen=True)
class PRFScore:
    precision: float
    recall: float
    f_measure: float
    precision_by_convention: bool = False
    recall_by_convention: bool = False

    def rounded(self, ndigits: int = 2) -> "PRFScore":
        return replace(
            self,
            precision=round(self.precision, ndigits),
            recall=round(self.recall, ndigits),
            f_measure=round(self.f_measure, ndigits),
        )

    def truncated(self, ndigits: int = 3) -> "PRFScore":
        factor = 10**ndigits
        return replace(
            self,
            precision=int(self.precision * factor) / factor,
            recall=int(self.recall * factor) / factor,
            f_measure=int(self.f_measure * factor) / factor,
        )


def f_measure(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def frame_tally(detections: "RectRegion | Iterable[Rect]", ground_truth: "RectRegion | Iterable[Rect]") -> AreaTally:
    """Exact area sums for one frame; unions, never box-count sums."""
    return AreaTally(
        intersection=region_intersection_area(detections, ground_truth),
        detected=union_area(detections),
        ground_truth=union_area(ground_truth),
    )


def aggregate(tallies: Iterable[AreaTally]) -> PRFScore:
    """Micro-aggregate: sum tallies across frames, then divide once."""
    total = AreaTally()
    for tally in tallies:
        total = total + tally
    if total.detected == 0 and total.ground_truth == 0:
        raise UndefinedScoreError("no detected and no ground-truth area; score undefined")
    if total.detected > 0:
        precision, p_conv = total.intersection / total.detected, False
    else:
        precision, p_conv = 1.0, True
    if total.ground_truth > 0:
        recall, r_conv = total.intersection / total.ground_truth, False
    else:
        recall, r_conv = 1.0, True
    return PRFScore(
        precision=precision,
        recall=recall,
        f_measure=f_measure(precision, recall),
        precision_by_convention=p_conv,
        recall_by_convention=r_conv,
    )


def _check_keys(dets: DetectionSet, ds: Dataset) -> None:
    known = {fa.key for fa in ds.frames}
    unknown = sorted(k for k in dets.frames if k not in known)
    if unknown:
        preview = ", ".join(f"{video}#{frame}" for video, frame in unknown[:10])
        raise UndefinedScoreError(
            f"{len(unknown)} detection frame key(s) not in the dataset: {preview}"
        )


def evaluate_detection(dets: DetectionSet, ds: Dataset) -> PRFScore:
    """Script-agnostic evaluation over every frame of the dataset."""
    _check_keys(dets, ds)
    if dets.mode == HYBRID:
        logger.warning("hybrid detections collapsed to script-agnostic text boxes")
    tallies = []
    for fa in ds.frames:
        det_boxes = [d.box for d in dets.frames.get(fa.key, ())]
        gt_boxes = [line.box for line in fa.lines]
        tallies.append(frame_tally(det_boxes, gt_boxes))
    return aggregate(tallies)


def evaluate_hybrid(dets: DetectionSet, ds: Dataset) -> dict[str, PRFScore]:
    """Per-script evaluation plus a script-agnostic combined row.

    For each script, only detections labeled with that script count against
    ground-truth lines of the same script. The ``combined`` entry ignores
    labels entirely.
    """
    if dets.mode != HYBRID:
        raise UndefinedScoreError(f"hybrid evaluation needs hybrid detections, got mode={dets.mode!r}")
    _check_keys(dets, ds)
    per_script: dict[str, list[AreaTally]] = {script: [] for script in SCRIPT_ORDER}
    combined: list[AreaTally] = []
    for fa in ds.frames:
        frame_dets = dets.frames.get(fa.key, ())
        for script in SCRIPT_ORDER:
            det_boxes = [d.box for d in frame_dets if d.label == script]
            gt_boxes = [line.box for line in fa.lines if line.script == script]
            per_script[script].append(frame_tally(det_boxes, gt_boxes))
        combined.append(
            frame_tally([d.box for d in frame_dets], [line.box for line in fa.lines])
        )
    scores = {script: aggregate(tallies) for script, tallies in per_script.items()}
    scores["combined"] = aggregate(combined)
    return scores


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed by (true script, predicted script) in SCRIPT_ORDER."""

    counts: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = SCRIPT_ORDER

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(self.counts) != n or any(len(row) != n for row in self.counts):
            raise ValueError(f"counts must be {n}x{n} for labels {self.labels}")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("counts must be non-negative")

    def count(self, true: str, predicted: str) -> int:
        return self.counts[self.labels.index(true)][self.labels.index(predicted)]

    def row_sum(self, true: str) -> int:
        return sum(self.counts[self.labels.index(true)])

    def column_sum(self, predicted: str) -> int:
        j = self.labels.index(predicted)
        return sum(row[j] for row in self.counts)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def accuracy(self) -> float:
        if self.total == 0:
            raise UndefinedScoreError("empty confusion matrix")
        return sum(self.counts[i][i] for i in range(len(self.labels))) / self.total


def confusion_matrix(pairs: Sequence[tuple[str, str]], labels: tuple[str, ...] = SCRIPT_ORDER) -> ConfusionMatrix:
    """Count (true, predicted) pairs into a matrix."""
    if not pairs:
        raise UndefinedScoreError("no classification pairs")
    index = {label: i for i, label in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for true, predicted in pairs:
        if true not in index or predicted not in index:
            raise UndefinedScoreError(f"pair ({true!r}, {predicted!r}) outside labels {labels}")
        counts[index[true]][index[predicted]] += 1
    return ConfusionMatrix(counts=tuple(tuple(row) for row in counts), labels=labels)


def class_prf(m: ConfusionMatrix) -> dict[str, PRFScore]:
    """Per-class precision (column-normalized diagonal) and recall (row-normalized)."""
    scores = {}
    for i, label in enumerate(m.labels):
        true_count = m.row_sum(label)
        if true_count == 0:
            raise UndefinedScoreError(f"class {label!r} has no true instances")
        predicted_count = m.column_sum(label)
        correct = m.counts[i][i]
        precision = correct / predicted_count if predicted_count > 0 else 0.0
        recall = correct / true_count
        scores[label] = PRFScore(precision, recall, f_measure(precision, recall))
    return scores


@dataclass(frozen=True)
class DiagnosticsReport:
    """Localization quality: greedy one-to-one matches and their shape errors."""

    matches: int
    misses: int  # ground-truth lines without a matched detection
    false_alarms: int  # detections without a matched ground-truth line
    iou_histogram: tuple[int, ...]  # ten bins over [0, 1]; IoU 1.0 in the last
    area_ratios: tuple[float, ...]  # detected area / ground-truth area per match
    oversize: int = field(init=False)
    undersize: int = field(init=False)
    mean_area_ratio: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "oversize", sum(1 for r in self.area_ratios if r > 1.0))
        object.__setattr__(self, "undersize", sum(1 for r in self.area_ratios if r < 1.0))
        mean = sum(self.area_ratios) / len(self.area_ratios) if self.area_ratios else 0.0
        object.__setattr__(self, "mean_area_ratio", mean)


def greedy_frame_matches(
    det_boxes: Sequence[Rect], gt_boxes: Sequence[Rect], iou_match: float
) -> list[tuple[int, int, float]]:
    """One-to-one (det, gt, IoU) matches: best IoU first, each box used once."""
    pairs = []
    for di, det in enumerate(det_boxes):
        for gi, gt in enumerate(gt_boxes):
            v = iou(det, gt)
            if v >= iou_match:
                pairs.append((v, di, gi))
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
    used_det: set[int] = set()
    used_gt: set[int] = set()
    matches = []
    for v, di, gi in pairs:
        if di in used_det or gi in used_gt:
            continue
        used_det.add(di)
        used_gt.add(gi)
        matches.append((di, gi, v))
    return matches


def localization_diagnostics(
    dets: DetectionSet, ds: Dataset, iou_match: float = 0.5
) -> DiagnosticsReport:
    """Frame-by-frame greedy matching; labels are ignored."""
    _check_keys(dets, ds)
    histogram = [0] * 10
    ratios: list[float] = []
    matches = misses = false_alarms = 0
    for fa in ds.frames:
        det_boxes = [d.box for d in dets.frames.get(fa.key, ())]
        gt_boxes = [line.box for line in fa.lines]
        frame_matches = greedy_frame_matches(det_boxes, gt_boxes, iou_match)
        matches += len(frame_matches)
        misses += len(gt_boxes) - len(frame_matches)
        false_alarms += len(det_boxes) - len(frame_matches)
        for di, gi, v in frame_matches:
            histogram[min(int(v * 10), 9)] += 1
            ratios.append(det_boxes[di].area / gt_boxes[gi].area)
    return DiagnosticsReport(
        matches=matches,
        misses=misses,
        false_alarms=false_alarms,
        iou_histogram=tuple(histogram),
        area_ratios=tuple(ratios),
    )


def continuous_frame_tally(
    det_boxes: Sequence[tuple[float, float, float, float]],
    gt_boxes: Sequence[tuple[float, float, float, float]],
) -> tuple[float, float, float]:
    """(intersection, detected, ground_truth) areas for float (x0, y0, x1, y1) boxes.

    The continuous twin of frame_tally, used by resolution sweeps to reason
    about rescaling without pixel rounding.
    """
    from utiv.geometry import _union_area

    pieces = []
    for ax0, ay0, ax1, ay1 in det_boxes:
        for bx0, by0, bx1, by1 in gt_boxes:
            x0, y0 = max(ax0, bx0), max(ay0, by0)
            x1, y1 = min(ax1, bx1), min(ay1, by1)
            if x1 > x0 and y1 > y0:
                pieces.append((x0, y0, x1, y1))
    return (
        float(_union_area(pieces)),
        float(_union_area(det_boxes)),
        float(_union_area(gt_boxes)),
    )


def prf_from_continuous(
    tallies: Iterable[tuple[float, float, float]],
) -> PRFScore:
    """Micro-aggregate continuous tallies into a PRFScore."""
    total_i = total_d = total_g = 0.0
    for i, d, g in tallies:
        total_i += i
        total_d += d
        total_g += g
    if total_d == 0.0 and total_g == 0.0:
        raise UndefinedScoreError("no detected and no ground-truth area; score undefined")
    precision = total_i / total_d if total_d > 0 else 1.0
    recall = total_i / total_g if total_g > 0 else 1.0
    return PRFScore(
        precision,
        recall,
        f_measure(precision, recall),
        precision_by_convention=total_d == 0,
        recall_by_convention=total_g == 0,
    )


def scores_to_csv(scores: Mapping[str, PRFScore]) -> str:
    """CSV rows (name, full precision P/R/F plus the 2-decimal table view)."""
    lines = ["name,precision,recall,f_measure,precision_2dp,recall_2dp,f_measure_2dp"]
    for name in sorted(scores):
        s = scores[name]
        r = s.rounded(2)
        lines.append(
            f"{name},{s.precision:.6f},{s.recall:.6f},{s.f_measure:.6f},"
            f"{r.precision:.2f},{r.recall:.2f},{r.f_measure:.2f}"
        )
    return "\n".join(lines) + "\n"


def scores_to_text(scores: Mapping[str, PRFScore], title: str = "") -> str:
    """Aligned-column table with 2-decimal scores, one row per name."""
    name_width = max([len(name) for name in scores] + [len("name")])
    lines = []
    if title:
        lines.append(title)
    lines.append(f"{'name':<{name_width}}  precision  recall  f-measure")
    for name in sorted(scores):
        s = scores[name].rounded(2)
        lines.append(f"{name:<{name_width}}  {s.precision:>9.2f}  {s.recall:>6.2f}  {s.f_measure:>9.2f}")
    return "\n".join(lines) + "\n"
