"""Data model for labeled video frames.

A frame annotation holds the channel, video and frame identity, the frame
dimensions and a list of text lines. Each text line is an axis-aligned box
with a script tag and a verbatim transcription (no normalization is applied;
that belongs to downstream recognition tooling).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from utiv.geometry import Rect

SCRIPTS = ("urdu", "english")

FrameKey = tuple[str, int]  # (video_id, frame_number)


@dataclass(frozen=True)
class TextLine:
    box: Rect
    script: str
    transcription: str = ""

    def __post_init__(self) -> None:
        if self.script not in SCRIPTS:
            raise ValueError(f"unknown script {self.script!r}, expected one of {SCRIPTS}")


@dataclass(frozen=True)
class FrameAnnotation:
    channel: str
    video_id: str
    frame_number: int
    width: int
    height: int
    lines: tuple[TextLine, ...] = ()

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"frame dimensions must be positive, got {self.width}x{self.height}")
        if self.frame_number < 0:
            raise ValueError(f"frame_number must be non-negative, got {self.frame_number}")

    @property
    def key(self) -> FrameKey:
        return (self.video_id, self.frame_number)

    def line_bounds_problems(self) -> list[str]:
        """Boxes not fully inside the frame, as human-readable problems."""
        problems = []
        for i, line in enumerate(self.lines):
            b = line.box
            if b.x < 0 or b.y < 0 or b.x2 > self.width or b.y2 > self.height:
                problems.append(
                    f"line {i}: box ({b.x},{b.y},{b.width},{b.height}) "
                    f"outside frame {self.width}x{self.height}"
                )
        return problems


@dataclass(frozen=True)
class Dataset:
    frames: tuple[FrameAnnotation, ...]
    root_path: Path | None = None

    def __len__(self) -> int:
        return len(self.frames)

    def by_key(self) -> dict[FrameKey, FrameAnnotation]:
        return {fa.key: fa for fa in self.frames}

    @property
    def total_lines(self) -> int:
        return sum(len(fa.lines) for fa in self.frames)


@dataclass(frozen=True)
class ChannelStats:
    channel: str
    videos: int
    frames: int
    urdu_lines: int
    english_lines: int


@dataclass(frozen=True)
class DatasetStats:
    channels: tuple[ChannelStats, ...]
    total: ChannelStats


@dataclass(frozen=True)
class Split:
    train_frames: tuple[FrameKey, ...]
    test_frames: tuple[FrameKey, ...]
    seed: int = field(default=0)
