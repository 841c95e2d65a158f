"""Detector-output ingestion and synthetic detections from perturbed ground truth.

Detection files are UTF-8 line-delimited records, one box per line::

    video_id frame_number label score x y width height

Fields are single-space separated; ``#`` begins a comment line. The label is
either ``text`` (script-agnostic runs) or one of ``urdu``/``english``
(script-aware runs); a file never mixes the two modes.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from utiv.dataset.model import Dataset, FrameKey
from utiv.errors import (
    MalformedLineError,
    MixedModeError,
    ScoreRangeError,
    UnknownLabelError,
)
from utiv.geometry import Rect, intersect_area

logger = logging.getLogger(__name__)

DETECT_ONLY = "detect-only"
HYBRID = "hybrid"

_DETECT_LABELS = ("text",)
_HYBRID_LABELS = ("urdu", "english")

PERTURB_MODES = ("exact", "dilate", "erode", "shift", "drop", "spurious")


@dataclass(frozen=True)
class Detection:
    box: Rect
    label: str
    score: float


@dataclass(frozen=True)
class DetectionSet:
    frames: dict[FrameKey, tuple[Detection, ...]] = field(default_factory=dict)
    mode: str | None = None  # detect-only | hybrid | None when empty

    def total(self) -> int:
        return sum(len(dets) for dets in self.frames.values())


def _mode_of(label: str) -> str:
    if label in _DETECT_LABELS:
        return DETECT_ONLY
    if label in _HYBRID_LABELS:
        return HYBRID
    raise UnknownLabelError(f"unknown label {label!r}")


def parse_detections(file: str | Path) -> DetectionSet:
    """Parse and validate a detection file; the mode is inferred from labels."""
    path = Path(file)
    frames: dict[FrameKey, list[Detection]] = {}
    mode: str | None = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(" ")
        if len(parts) != 8:
            raise MalformedLineError(f"expected 8 fields, got {len(parts)}", lineno)
        video_id, frame_s, label, score_s, x_s, y_s, w_s, h_s = parts
        try:
            frame_number = int(frame_s)
            x, y, w, h = int(x_s), int(y_s), int(w_s), int(h_s)
        except ValueError:
            raise MalformedLineError(f"non-integer numeric field in {line!r}", lineno) from None
        if frame_number < 0:
            raise MalformedLineError(f"negative frame number {frame_number}", lineno)
        try:
            score = float(score_s)
        except ValueError:
            raise MalformedLineError(f"score {score_s!r} is not a number", lineno) from None
        if not 0.0 <= score <= 1.0:
            raise ScoreRangeError(f"score {score} outside [0, 1]", lineno)
        try:
            label_mode = _mode_of(label)
        except UnknownLabelError as exc:
            raise UnknownLabelError(str(exc), lineno) from None
        if mode is None:
            mode = label_mode
        elif mode != label_mode:
            raise MixedModeError(
                f"label {label!r} is {label_mode} but the file started as {mode}", lineno
            )
        try:
            box = Rect(x, y, w, h)
        except ValueError as exc:
            raise MalformedLineError(str(exc), lineno) from None
        frames.setdefault((video_id, frame_number), []).append(Detection(box, label, score))
    return DetectionSet(frames={k: tuple(v) for k, v in frames.items()}, mode=mode)


def write_detections(dets: DetectionSet, file: str | Path) -> None:
    """Inverse of parse_detections, in deterministic key order."""
    lines = []
    for (video_id, frame_number), frame_dets in sorted(dets.frames.items()):
        for d in frame_dets:
            lines.append(
                f"{video_id} {frame_number} {d.label} {d.score:g} "
                f"{d.box.x} {d.box.y} {d.box.width} {d.box.height}"
            )
    Path(file).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def _dilate(box: Rect, magnitude: int, frame_w: int, frame_h: int) -> Rect:
    grown = Rect(box.x - magnitude, box.y - magnitude, box.width + 2 * magnitude, box.height + 2 * magnitude)
    clipped = grown.clipped(frame_w, frame_h)
    assert clipped is not None  # grown contains the in-frame original
    return clipped


def _erode(box: Rect, magnitude: int) -> Rect | None:
    w = box.width - 2 * magnitude
    h = box.height - 2 * magnitude
    if w < 1 or h < 1:
        return None
    return Rect(box.x + magnitude, box.y + magnitude, w, h)


def _shift(box: Rect, magnitude: int, frame_w: int, frame_h: int, rng: random.Random) -> Rect | None:
    dx = rng.randint(-magnitude, magnitude)
    dy = rng.randint(-magnitude, magnitude)
    return box.translated(dx, dy).clipped(frame_w, frame_h)


def _spurious_boxes(
    gt: list[Rect], count: int, frame_w: int, frame_h: int, rng: random.Random
) -> list[Rect]:
    """Random boxes rejection-sampled to avoid all ground truth."""
    boxes: list[Rect] = []
    for _ in range(count):
        for _attempt in range(200):
            h = rng.randint(8, max(8, frame_h // 8))
            w = rng.randint(h, max(h, frame_w // 4))
            if w >= frame_w or h >= frame_h:
                continue
            x = rng.randint(0, frame_w - w)
            y = rng.randint(0, frame_h - h)
            candidate = Rect(x, y, w, h)
            if all(intersect_area(candidate, g) == 0 for g in gt):
                boxes.append(candidate)
                break
    return boxes


def perturb_ground_truth(
    ds: Dataset,
    mode: str,
    magnitude: float = 0,
    seed: int = 0,
    hybrid: bool = False,
) -> DetectionSet:
    """Derive synthetic detections from the ground truth, deterministically.

    Modes: ``exact`` copies boxes; ``dilate`` grows each box outward by
    ``magnitude`` pixels (clipped to the frame); ``erode`` shrinks inward and
    drops boxes that degenerate; ``shift`` translates by a per-box uniform
    offset in [-magnitude, magnitude]^2; ``drop`` removes each box with
    probability ``magnitude``; ``spurious`` adds ``magnitude`` boxes per
    frame placed entirely outside the ground truth. Scores are 1.0; labels
    copy the ground-truth script when ``hybrid`` else are ``text``.
    """
    if mode not in PERTURB_MODES:
        raise ValueError(f"unknown perturbation mode {mode!r}, expected one of {PERTURB_MODES}")
    if mode == "drop" and not 0.0 <= magnitude <= 1.0:
        raise ValueError(f"drop probability must be in [0, 1], got {magnitude}")
    if mode in ("dilate", "erode", "shift", "spurious") and (magnitude < 0 or magnitude != int(magnitude)):
        raise ValueError(f"{mode} magnitude must be a non-negative integer, got {magnitude}")
    rng = random.Random(seed)
    out: dict[FrameKey, tuple[Detection, ...]] = {}
    for fa in sorted(ds.frames, key=lambda f: f.key):
        dets: list[Detection] = []

        def emit(box: Rect, script: str) -> None:
            dets.append(Detection(box, script if hybrid else "text", 1.0))

        for line in fa.lines:
            if mode == "exact" or mode == "spurious":
                emit(line.box, line.script)
            elif mode == "dilate":
                emit(_dilate(line.box, int(magnitude), fa.width, fa.height), line.script)
            elif mode == "erode":
                eroded = _erode(line.box, int(magnitude))
                if eroded is None:
                    logger.warning(
                        "erode magnitude %d swallows box %s in frame %s", int(magnitude), line.box, fa.key
                    )
                    continue
                emit(eroded, line.script)
            elif mode == "shift":
                shifted = _shift(line.box, int(magnitude), fa.width, fa.height, rng)
                if shifted is None:
                    continue
                emit(shifted, line.script)
            elif mode == "drop":
                if rng.random() >= magnitude:
                    emit(line.box, line.script)
        if mode == "spurious":
            gt_boxes = [line.box for line in fa.lines]
            for box in _spurious_boxes(gt_boxes, int(magnitude), fa.width, fa.height, rng):
                emit(box, rng.choice(_HYBRID_LABELS))
        out[fa.key] = tuple(dets)
    return DetectionSet(frames=out, mode=HYBRID if hybrid else DETECT_ONLY)
