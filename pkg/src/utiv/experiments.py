"""Reproducible sensitivity harnesses: resolution sweeps, training subsets,
and deterministic report emission.

No model training happens here. The resolution sweep rescales ground truth
(and optionally detections) and re-scores; training subsets are nested
frame lists sized by line budget, meant to feed an external trainer whose
per-subset detections come back through the normal ingestion path.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from utiv.dataset.model import Dataset, FrameAnnotation, FrameKey, TextLine
from utiv.detections import Detection, DetectionSet
from utiv.evaluation import (
    PRFScore,
    continuous_frame_tally,
    evaluate_detection,
    prf_from_continuous,
    scores_to_csv,
    scores_to_text,
)
from utiv.geometry import Rect


@dataclass(frozen=True)
class SweepPoint:
    param: object  # (width, height) resolution or training-line count
    score: PRFScore


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def scale_rect(rect: Rect, sx: float, sy: float) -> Rect:
    """Per-axis rescale with half-up rounding; never collapses below 1 px."""
    return Rect(
        _round_half_up(rect.x * sx),
        _round_half_up(rect.y * sy),
        max(_round_half_up(rect.width * sx), 1),
        max(_round_half_up(rect.height * sy), 1),
    )


def _scale_dataset(ds: Dataset, width: int, height: int) -> Dataset:
    frames = []
    for fa in ds.frames:
        sx, sy = width / fa.width, height / fa.height
        lines = []
        for line in fa.lines:
            # rounding x and width separately can poke 1 px past the frame
            box = scale_rect(line.box, sx, sy).clipped(width, height)
            if box is None:
                continue
            lines.append(TextLine(box, line.script, line.transcription))
        frames.append(
            FrameAnnotation(fa.channel, fa.video_id, fa.frame_number, width, height, tuple(lines))
        )
    return Dataset(tuple(frames), ds.root_path)


def _scale_detections(dets: DetectionSet, ds: Dataset, width: int, height: int) -> DetectionSet:
    by_key = ds.by_key()
    frames = {}
    for key, frame_dets in dets.frames.items():
        fa = by_key[key]
        sx, sy = width / fa.width, height / fa.height
        scaled = []
        for d in frame_dets:
            box = scale_rect(d.box, sx, sy).clipped(width, height)
            if box is None:
                continue
            scaled.append(Detection(box, d.label, d.score))
        frames[key] = tuple(scaled)
    return DetectionSet(frames=frames, mode=dets.mode)


def resolution_sweep(
    ds: Dataset,
    dets: "DetectionSet | Mapping[tuple[int, int], DetectionSet]",
    resolutions: Sequence[tuple[int, int]],
    rescale_detections: bool = True,
) -> list[SweepPoint]:
    """Score the detections at each target resolution.

    Ground truth is rescaled per axis from each frame's own base resolution.
    Detections are rescaled the same way when ``rescale_detections`` is set;
    alternatively pass a mapping from resolution to an externally produced
    DetectionSet per point.
    """
    for width, height in resolutions:
        if width < 1 or height < 1:
            raise ValueError(f"bad resolution {width}x{height}")
    points = []
    for width, height in sorted(resolutions):
        scaled_ds = _scale_dataset(ds, width, height)
        if isinstance(dets, DetectionSet):
            point_dets = _scale_detections(dets, ds, width, height) if rescale_detections else dets
        else:
            if (width, height) not in dets:
                raise ValueError(f"no detections supplied for resolution {width}x{height}")
            point_dets = dets[(width, height)]
        points.append(SweepPoint(param=(width, height), score=evaluate_detection(point_dets, scaled_ds)))
    return points


def continuous_resolution_score(
    ds: Dataset, dets: DetectionSet, width: int, height: int
) -> PRFScore:
    """The sweep's no-rounding twin: scale boxes as reals and score."""
    tallies = []
    for fa in ds.frames:
        sx, sy = width / fa.width, height / fa.height
        gt = [(line.box.x * sx, line.box.y * sy, line.box.x2 * sx, line.box.y2 * sy) for line in fa.lines]
        det = [
            (d.box.x * sx, d.box.y * sy, d.box.x2 * sx, d.box.y2 * sy)
            for d in dets.frames.get(fa.key, ())
        ]
        tallies.append(continuous_frame_tally(det, gt))
    return prf_from_continuous(tallies)


def training_subsets(
    ds: Dataset, line_counts: Sequence[int], seed: int
) -> list[list[FrameKey]]:
    """Nested frame subsets whose line totals just reach each budget.

    Frames are shuffled once (seed-deterministic); each budget takes the
    shortest prefix whose cumulative line count reaches it, so every subset
    contains the previous one and overshoots by less than one frame's lines.
    """
    if list(line_counts) != sorted(line_counts):
        raise ValueError(f"line_counts must be ascending, got {list(line_counts)}")
    total = ds.total_lines
    over = [c for c in line_counts if c > total]
    if over:
        raise ValueError(f"budget {over[0]} exceeds the {total} lines available")
    rng_order = sorted(fa.key for fa in ds.frames)
    random.Random(seed).shuffle(rng_order)
    lines_of = {fa.key: len(fa.lines) for fa in ds.frames}
    subsets = []
    for budget in line_counts:
        cumulative = 0
        prefix = []
        for key in rng_order:
            if cumulative >= budget:
                break
            prefix.append(key)
            cumulative += lines_of[key]
        subsets.append(prefix)
    return subsets


def sweep_to_csv(points: Sequence[SweepPoint]) -> str:
    lines = ["param,precision,recall,f_measure"]
    for p in points:
        param = "x".join(str(v) for v in p.param) if isinstance(p.param, tuple) else str(p.param)
        lines.append(f"{param},{p.score.precision:.6f},{p.score.recall:.6f},{p.score.f_measure:.6f}")
    return "\n".join(lines) + "\n"


def emit_report(
    results: Mapping[str, "PRFScore | Mapping[str, PRFScore] | Sequence[SweepPoint]"],
    out_dir: str | Path,
) -> list[Path]:
    """Write one CSV per named table plus a plain-text summary.

    Output bytes are a pure function of the input: names are sorted, columns
    fixed, floats formatted at fixed precision.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    summary_parts = []
    for name in sorted(results):
        value = results[name]
        path = out_dir / f"{name}.csv"
        if isinstance(value, PRFScore):
            path.write_text(scores_to_csv({name: value}), encoding="utf-8")
            summary_parts.append(scores_to_text({name: value}, title=name))
        elif isinstance(value, Mapping):
            path.write_text(scores_to_csv(value), encoding="utf-8")
            summary_parts.append(scores_to_text(value, title=name))
        else:
            path.write_text(sweep_to_csv(value), encoding="utf-8")
            rows = {
                ("x".join(str(v) for v in p.param) if isinstance(p.param, tuple) else str(p.param)): p.score
                for p in value
            }
            summary_parts.append(scores_to_text(rows, title=name))
        written.append(path)
    summary = out_dir / "summary.txt"
    summary.write_text("\n".join(summary_parts) if summary_parts else "no results\n", encoding="utf-8")
    written.append(summary)
    return written
