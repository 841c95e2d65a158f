"""Near-duplicate frame filtering with a 64-bit difference hash.

Successive video frames mostly repeat the same overlaid text, so labeling
effort should go to frames whose content actually changed. The filter walks
a frame directory in name order and drops every frame whose difference hash
is within a Hamming-distance threshold of the last kept frame.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from utiv.dataset.corpus import IMAGE_SUFFIXES
from utiv.errors import DatasetError

logger = logging.getLogger(__name__)


def dhash(image: Image.Image) -> int:
    """64-bit difference hash: 8x8 signs of horizontal gradients at 9x8."""
    gray = image.convert("L").resize((9, 8), Image.Resampling.LANCZOS)
    pixels = np.asarray(gray, dtype=np.int16)
    bits = pixels[:, 1:] > pixels[:, :-1]
    value = 0
    for bit in bits.flatten():
        value = (value << 1) | int(bit)
    return value


def hamming_distance(a: int, b: int) -> int:
    return (a ^ b).bit_count()


def dedup_frames(frame_dir: str | Path, hamming_threshold: int) -> list[Path]:
    """Return the paths to keep, preserving scan order.

    A frame is dropped when its hash is within ``hamming_threshold`` of the
    last kept frame. Undecodable images are skipped with a warning and do
    not become the comparison reference.
    """
    if hamming_threshold < 0:
        raise ValueError(f"hamming_threshold must be non-negative, got {hamming_threshold}")
    frame_dir = Path(frame_dir)
    if not frame_dir.is_dir():
        raise DatasetError(f"{frame_dir} is not a directory")
    kept: list[Path] = []
    last_hash: int | None = None
    for path in sorted(frame_dir.iterdir()):
        if path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        try:
            with Image.open(path) as image:
                h = dhash(image)
        except (OSError, UnidentifiedImageError) as exc:
            logger.warning("skipping undecodable image %s: %s", path, exc)
            continue
        if last_hash is not None and hamming_distance(h, last_hash) <= hamming_threshold:
            continue
        kept.append(path)
        last_hash = h
    return kept
