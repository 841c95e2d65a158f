"""Dataset assembly from disk, validation, statistics and train/test splits.

Directory layout::

    root/<channel>/<video_id>/frames/*.png|jpg   frame images
    root/<channel>/<video_id>/gt/*.xml           annotations, one per frame

Annotation files are named ``<video_id>_<frame_number>.xml`` and must have a
sibling image with the same stem.
"""

from __future__ import annotations

import io
import logging
import random
from dataclasses import dataclass
from pathlib import Path

from utiv.dataset.model import (
    ChannelStats,
    Dataset,
    DatasetStats,
    FrameAnnotation,
    FrameKey,
    Split,
)
from utiv.dataset.xml_io import parse_frame_annotation
from utiv.errors import AnnotationError, DatasetError

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    key: FrameKey | None
    message: str


def find_frame_image(video_dir: Path, stem: str) -> Path | None:
    for suffix in IMAGE_SUFFIXES:
        candidate = video_dir / "frames" / f"{stem}{suffix}"
        if candidate.exists():
            return candidate
    return None


def load_dataset(root: str | Path, strict: bool = False) -> Dataset:
    """Load every annotation under ``root``; deterministic frame order.

    Raises DatasetError for orphan annotations (no matching image),
    unreadable or unparseable files, and duplicate (video, frame) keys.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")
    frames: list[FrameAnnotation] = []
    seen: dict[FrameKey, Path] = {}
    for xml_path in sorted(root.glob("*/*/gt/*.xml")):
        video_dir = xml_path.parent.parent
        channel_dir = video_dir.parent
        if find_frame_image(video_dir, xml_path.stem) is None:
            raise DatasetError(f"orphan annotation {xml_path}: no frame image named {xml_path.stem}.*")
        try:
            text = xml_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise DatasetError(f"unreadable annotation {xml_path}: {exc}") from exc
        try:
            fa = parse_frame_annotation(text, strict=strict)
        except AnnotationError as exc:
            raise DatasetError(f"{xml_path}: {exc}") from exc
        if fa.channel != channel_dir.name or fa.video_id != video_dir.name:
            raise DatasetError(
                f"{xml_path}: annotation names channel={fa.channel!r} video={fa.video_id!r} "
                f"but lives under {channel_dir.name}/{video_dir.name}"
            )
        if fa.key in seen:
            raise DatasetError(f"duplicate frame key {fa.key} in {xml_path} and {seen[fa.key]}")
        seen[fa.key] = xml_path
        frames.append(fa)
    frames.sort(key=lambda fa: (fa.channel, fa.video_id, fa.frame_number))
    return Dataset(frames=tuple(frames), root_path=root)


def validate_dataset(ds: Dataset) -> list[Issue]:
    """Report consistency problems without raising.

    Errors: out-of-bounds boxes, zero-area boxes, duplicate frame keys.
    Warnings: empty transcriptions, repeated identical boxes in a frame.
    """
    issues: list[Issue] = []
    seen_keys: set[FrameKey] = set()
    for fa in ds.frames:
        if fa.key in seen_keys:
            issues.append(Issue("error", fa.key, "duplicate frame key"))
        seen_keys.add(fa.key)
        for problem in fa.line_bounds_problems():
            issues.append(Issue("error", fa.key, problem))
        seen_boxes = set()
        for i, line in enumerate(fa.lines):
            if line.box.width < 1 or line.box.height < 1:
                issues.append(Issue("error", fa.key, f"line {i}: zero-area box"))
            if line.box in seen_boxes:
                issues.append(Issue("warning", fa.key, f"line {i}: identical box repeated"))
            seen_boxes.add(line.box)
            if not line.transcription:
                issues.append(Issue("warning", fa.key, f"line {i}: empty transcription"))
    return issues


def dataset_stats(ds: Dataset) -> DatasetStats:
    """Per-channel video/frame/line counts plus a computed totals row."""
    per_channel: dict[str, dict[str, object]] = {}
    for fa in ds.frames:
        bucket = per_channel.setdefault(
            fa.channel, {"videos": set(), "frames": 0, "urdu": 0, "english": 0}
        )
        bucket["videos"].add(fa.video_id)  # type: ignore[union-attr]
        bucket["frames"] += 1  # type: ignore[operator]
        for line in fa.lines:
            bucket["urdu" if line.script == "urdu" else "english"] += 1  # type: ignore[operator]
    rows = tuple(
        ChannelStats(
            channel=channel,
            videos=len(bucket["videos"]),  # type: ignore[arg-type]
            frames=bucket["frames"],  # type: ignore[arg-type]
            urdu_lines=bucket["urdu"],  # type: ignore[arg-type]
            english_lines=bucket["english"],  # type: ignore[arg-type]
        )
        for channel, bucket in sorted(per_channel.items())
    )
    total = ChannelStats(
        channel="total",
        videos=sum(r.videos for r in rows),
        frames=sum(r.frames for r in rows),
        urdu_lines=sum(r.urdu_lines for r in rows),
        english_lines=sum(r.english_lines for r in rows),
    )
    return DatasetStats(channels=rows, total=total)


def stats_to_csv(stats: DatasetStats) -> str:
    out = io.StringIO()
    out.write("channel,videos,frames,urdu_lines,english_lines\n")
    for row in (*stats.channels, stats.total):
        out.write(f"{row.channel},{row.videos},{row.frames},{row.urdu_lines},{row.english_lines}\n")
    return out.getvalue()


def _round_half_up(value: float) -> int:
    import math

    return math.floor(value + 0.5)


def split_dataset(
    ds: Dataset,
    train_fraction: float,
    seed: int,
    stratify_by_channel: bool = False,
) -> Split:
    """Frame-level train/test partition, reproducible from the seed.

    With stratification the fraction is applied per channel; otherwise to the
    whole frame list. Frames are never divided: all lines of a frame stay on
    one side.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = random.Random(seed)
    groups: dict[str, list[FrameKey]]
    if stratify_by_channel:
        groups = {}
        for fa in ds.frames:
            groups.setdefault(fa.channel, []).append(fa.key)
    else:
        groups = {"": [fa.key for fa in ds.frames]}
    train: list[FrameKey] = []
    test: list[FrameKey] = []
    for _, keys in sorted(groups.items()):
        keys = sorted(keys)
        rng.shuffle(keys)
        n_train = _round_half_up(len(keys) * train_fraction)
        train.extend(keys[:n_train])
        test.extend(keys[n_train:])
    return Split(train_frames=tuple(sorted(train)), test_frames=tuple(sorted(test)), seed=seed)
