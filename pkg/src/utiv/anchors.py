"""Anchor-box design for wide, short text lines.

Builds the anchor shape set from a base size, a list of scales and a list of
height/width aspect ratios, tiles the shapes over a frame on a stride grid,
assigns anchors to ground-truth boxes by IoU, and converts between boxes and
regression targets (center offsets plus log size ratios).

Two shape conventions are supported, selected by ``AnchorConfig.convention``:

* ``area-preserving`` (default): every shape at scale ``s`` covers the area
  of a ``(base_size * s)`` square, stretched to the requested aspect ratio,
  i.e. ``width = base_size * s / sqrt(ar)`` and ``height = base_size * s * sqrt(ar)``.
* ``width-scaled``: ``width = base_size * s`` and ``height = width * ar``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from utiv.errors import ConfigError, DecodeError
from utiv.geometry import Rect, iou

CONVENTIONS = ("area-preserving", "width-scaled")

POSITIVE = "positive"
NEGATIVE = "negative"
IGNORE = "ignore"


def round_half_up(value: float) -> int:
    """Round to the nearest integer, halves away from the floor (2.5 -> 3, -2.5 -> -2)."""
    return math.floor(value + 0.5)


@dataclass(frozen=True)
class AnchorConfig:
    base_size: int = 256
    scales: tuple[float, ...] = (1.0, 2.0, 5.0)
    aspect_ratios: tuple[float, ...] = (0.125, 0.1875, 0.25, 0.375, 0.50)
    convention: str = "area-preserving"
    stride: int = 16
    clip_to_image: bool = True

    def __post_init__(self) -> None:
        if self.base_size <= 0:
            raise ConfigError(f"base_size must be positive, got {self.base_size}")
        if self.stride <= 0:
            raise ConfigError(f"stride must be positive, got {self.stride}")
        if not self.scales or any(s <= 0 for s in self.scales):
            raise ConfigError(f"scales must be non-empty and strictly positive, got {self.scales!r}")
        if not self.aspect_ratios or any(a <= 0 for a in self.aspect_ratios):
            raise ConfigError(
                f"aspect_ratios must be non-empty and strictly positive, got {self.aspect_ratios!r}"
            )
        if self.convention not in CONVENTIONS:
            raise ConfigError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")


@dataclass(frozen=True)
class AnchorShape:
    """One anchor geometry; width/height are continuous pixels."""

    width: float
    height: float
    scale: float
    aspect_ratio: float


@dataclass(frozen=True)
class AnchorAssignment:
    anchor_index: int
    label: str  # positive | negative | ignore
    matched_gt: int | None
    iou: float


@dataclass(frozen=True)
class RegressionTarget:
    """Box offsets relative to an anchor: center shifts and log size ratios."""

    tx: float
    ty: float
    tw: float
    th: float


def generate_anchor_shapes(config: AnchorConfig) -> list[AnchorShape]:
    """One shape per (scale, aspect_ratio) pair, scale-major order."""
    shapes = []
    for scale in config.scales:
        side = config.base_size * scale
        for ar in config.aspect_ratios:
            if config.convention == "area-preserving":
                width = side / math.sqrt(ar)
                height = side * math.sqrt(ar)
            else:
                width = side
                height = side * ar
            shapes.append(AnchorShape(width=width, height=height, scale=scale, aspect_ratio=ar))
    return shapes


def tile_anchors(
    shapes: Sequence[AnchorShape],
    image_width: int,
    image_height: int,
    config: AnchorConfig,
) -> list[Rect]:
    """Center every shape at every stride-spaced grid point.

    Grid points are (col * stride, row * stride) with ceil(dim / stride)
    positions per axis; output order is row-major over grid points, then
    shape index. With clipping enabled, anchors are cut to the frame and
    anchors left without area are dropped.
    """
    if image_width < config.stride or image_height < config.stride:
        raise ConfigError(
            f"image {image_width}x{image_height} smaller than stride {config.stride}"
        )
    cols = math.ceil(image_width / config.stride)
    rows = math.ceil(image_height / config.stride)
    anchors: list[Rect] = []
    for row in range(rows):
        cy = row * config.stride
        for col in range(cols):
            cx = col * config.stride
            for shape in shapes:
                x0 = round_half_up(cx - shape.width / 2)
                x1 = round_half_up(cx + shape.width / 2)
                y0 = round_half_up(cy - shape.height / 2)
                y1 = round_half_up(cy + shape.height / 2)
                rect = Rect(x0, y0, max(x1 - x0, 1), max(y1 - y0, 1))
                if config.clip_to_image:
                    clipped = rect.clipped(image_width, image_height)
                    if clipped is None:
                        continue
                    rect = clipped
                anchors.append(rect)
    return anchors


def assign_anchors(
    anchors: Sequence[Rect],
    gt: Sequence[Rect],
    positive_iou: float = 0.5,
    negative_iou: float = 0.3,
) -> list[AnchorAssignment]:
    """Label each anchor positive/negative/ignore against the ground truth.

    An anchor is positive when its best IoU reaches ``positive_iou``,
    negative when its best IoU is below ``negative_iou`` against every box,
    and ignore in between. Additionally every ground-truth box that overlaps
    at least one anchor claims one positive anchor so no box goes unmatched:
    boxes claim in index order, each taking its highest-IoU anchor not
    already claimed by an earlier box (ties break to the lowest anchor
    index). A claimed anchor is matched to the claiming box even when a
    different box overlaps it more.
    """
    if not 0.0 <= negative_iou <= positive_iou <= 1.0:
        raise ConfigError(
            f"thresholds must satisfy 0 <= negative ({negative_iou}) <= positive ({positive_iou}) <= 1"
        )
    n = len(anchors)
    table = [[iou(anchor, box) for box in gt] for anchor in anchors]
    best_iou = [max(row) if row else 0.0 for row in table]
    best_gt: list[int | None] = [
        row.index(best_iou[ai]) if row and best_iou[ai] > 0.0 else None
        for ai, row in enumerate(table)
    ]

    claimed: dict[int, int] = {}  # anchor index -> gt index that claimed it
    for gi in range(len(gt)):
        candidates = sorted(
            (ai for ai in range(n) if table[ai][gi] > 0.0),
            key=lambda ai: (-table[ai][gi], ai),
        )
        for ai in candidates:
            if ai not in claimed:
                claimed[ai] = gi
                break

    assignments = []
    for ai in range(n):
        if ai in claimed:
            gi = claimed[ai]
            assignments.append(AnchorAssignment(ai, POSITIVE, gi, table[ai][gi]))
        elif best_gt[ai] is not None and best_iou[ai] >= positive_iou:
            assignments.append(AnchorAssignment(ai, POSITIVE, best_gt[ai], best_iou[ai]))
        elif best_iou[ai] < negative_iou:
            assignments.append(AnchorAssignment(ai, NEGATIVE, None, best_iou[ai]))
        else:
            assignments.append(AnchorAssignment(ai, IGNORE, None, best_iou[ai]))
    return assignments


def _center_size(rect: Rect) -> tuple[float, float, float, float]:
    return rect.x + rect.width / 2, rect.y + rect.height / 2, float(rect.width), float(rect.height)


def encode_box(anchor: Rect, gt: Rect) -> RegressionTarget:
    """Targets that move the anchor onto the ground-truth box."""
    acx, acy, aw, ah = _center_size(anchor)
    gcx, gcy, gw, gh = _center_size(gt)
    return RegressionTarget(
        tx=(gcx - acx) / aw,
        ty=(gcy - acy) / ah,
        tw=math.log(gw / aw),
        th=math.log(gh / ah),
    )


def decode_box(anchor: Rect, t: RegressionTarget, max_extent: int = 16384) -> Rect:
    """Exact inverse of encode_box, rounded half-up to integer pixels.

    Raises DecodeError when the decoded box degenerates below one pixel or
    overflows ``max_extent`` in any coordinate or dimension.
    """
    acx, acy, aw, ah = _center_size(anchor)
    try:
        w = aw * math.exp(t.tw)
        h = ah * math.exp(t.th)
    except OverflowError as exc:
        raise DecodeError(f"size targets overflow: tw={t.tw}, th={t.th}") from exc
    cx = t.tx * aw + acx
    cy = t.ty * ah + acy
    x0 = round_half_up(cx - w / 2)
    x1 = round_half_up(cx + w / 2)
    y0 = round_half_up(cy - h / 2)
    y1 = round_half_up(cy + h / 2)
    if x1 - x0 < 1 or y1 - y0 < 1:
        raise DecodeError(f"decoded box degenerates to {x1 - x0}x{y1 - y0}")
    if max(abs(x0), abs(x1), abs(y0), abs(y1), x1 - x0, y1 - y0) > max_extent:
        raise DecodeError(f"decoded box exceeds max extent {max_extent}: ({x0},{y0})..({x1},{y1})")
    return Rect(x0, y0, x1 - x0, y1 - y0)


_CONFIG_KEYS = ("base_size", "scales", "aspect_ratios", "convention", "stride", "clip_to_image")


def load_anchor_config(path: str | Path) -> AnchorConfig:
    """Read an AnchorConfig from a plain key = value text file.

    Recognized keys: base_size, scales, aspect_ratios, convention, stride,
    clip_to_image. List values are comma separated; '#' starts a comment.
    Unspecified keys keep their defaults.
    """
    values: dict[str, object] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in ("base_size", "stride"):
                values[key] = int(value)
            elif key in ("scales", "aspect_ratios"):
                values[key] = tuple(float(part) for part in value.split(",") if part.strip())
            elif key == "clip_to_image":
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                values[key] = value.lower() in ("true", "1", "yes")
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return AnchorConfig(**values)  # type: ignore[arg-type]
