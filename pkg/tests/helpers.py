from __future__ import annotations

import random
from pathlib import Path

import numpy as np
from PIL import Image

from utiv.dataset.model import FrameAnnotation, TextLine
from utiv.dataset.xml_io import write_frame_annotation
from utiv.geometry import Rect

URDU_SAMPLES = ("خبر", "پاکستان میں آج", "تازہ ترین", "وزیراعظم", "")
ENGLISH_SAMPLES = ("BREAKING NEWS", "Live Update", "Headlines 9 PM", "Sports", "")

# the ten documented detection-file malformations with their error classes;
# error classes are named by string to keep this module import-light
DETECTION_MALFORMATIONS = [
    ("vid01 0 text 0.9 10 20 30", "MalformedLineError"),  # 7 fields
    ("vid01 0 text 0.9 10 20 30 40 50", "MalformedLineError"),  # 9 fields
    ("vid01 x text 0.9 10 20 30 40", "MalformedLineError"),  # bad frame number
    ("vid01 -2 text 0.9 10 20 30 40", "MalformedLineError"),  # negative frame
    ("vid01 0 caption 0.9 10 20 30 40", "UnknownLabelError"),  # unknown label
    ("vid01 0 text 1.5 10 20 30 40", "ScoreRangeError"),  # score above 1
    ("vid01 0 text -0.1 10 20 30 40", "ScoreRangeError"),  # score below 0
    ("vid01 0 text high 10 20 30 40", "MalformedLineError"),  # non-numeric score
    ("vid01 0 text 0.9 10 20 0 40", "MalformedLineError"),  # zero width
    ("vid01 0 text 0.9 10 20.5 30 40", "MalformedLineError"),  # fractional coordinate
]


def rasterize(rects: list[Rect], width: int, height: int, out: np.ndarray | None = None) -> np.ndarray:
    """Pixel-mask oracle: mark every pixel covered by any rect."""
    if out is None:
        out = np.zeros((height, width), dtype=bool)
    else:
        out[:] = False
    for r in rects:
        out[max(r.y, 0) : r.y2, max(r.x, 0) : r.x2] = True
    return out


def random_rects(rng: random.Random, n: int, frame_w: int, frame_h: int, max_side: int = 400) -> list[Rect]:
    """Random rects fully inside the frame."""
    rects = []
    for _ in range(n):
        w = rng.randint(1, min(max_side, frame_w))
        h = rng.randint(1, min(max_side, frame_h))
        x = rng.randint(0, frame_w - w)
        y = rng.randint(0, frame_h - h)
        rects.append(Rect(x, y, w, h))
    return rects


def random_text_line(
    rng: random.Random,
    frame_w: int,
    frame_h: int,
    margin: int = 0,
    min_height: int = 8,
) -> TextLine:
    """A plausible caption line: wide, short, inside the frame with a margin."""
    h = rng.randint(min_height, max(min_height, frame_h // 8))
    w = rng.randint(3 * h, max(3 * h, frame_w // 2))
    w = min(w, frame_w - 2 * margin)
    h = min(h, frame_h - 2 * margin)
    x = rng.randint(margin, frame_w - margin - w)
    y = rng.randint(margin, frame_h - margin - h)
    script = rng.choice(("urdu", "english"))
    samples = URDU_SAMPLES if script == "urdu" else ENGLISH_SAMPLES
    return TextLine(box=Rect(x, y, w, h), script=script, transcription=rng.choice(samples))


def random_annotation(
    rng: random.Random,
    channel: str = "newsone",
    video_id: str = "vid01",
    frame_number: int = 0,
    frame_w: int = 320,
    frame_h: int = 240,
    max_lines: int = 5,
    min_lines: int = 0,
    margin: int = 0,
    min_height: int = 8,
) -> FrameAnnotation:
    lines = tuple(
        random_text_line(rng, frame_w, frame_h, margin=margin, min_height=min_height)
        for _ in range(rng.randint(min_lines, max_lines))
    )
    return FrameAnnotation(
        channel=channel,
        video_id=video_id,
        frame_number=frame_number,
        width=frame_w,
        height=frame_h,
        lines=lines,
    )


def write_dataset_tree(root: Path, annotations: list[FrameAnnotation], image_suffix: str = ".png") -> None:
    """Materialize annotations as the on-disk channel/video tree with stub images."""
    stub = Image.new("RGB", (8, 8), color=(30, 30, 30))
    for fa in annotations:
        video_dir = root / fa.channel / fa.video_id
        (video_dir / "frames").mkdir(parents=True, exist_ok=True)
        (video_dir / "gt").mkdir(parents=True, exist_ok=True)
        stem = f"{fa.video_id}_{fa.frame_number}"
        stub.save(video_dir / "frames" / f"{stem}{image_suffix}")
        (video_dir / "gt" / f"{stem}.xml").write_text(write_frame_annotation(fa), encoding="utf-8")
