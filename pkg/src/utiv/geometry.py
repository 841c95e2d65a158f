"""Exact axis-aligned rectangle algebra: areas, unions, IoU and NMS.

Rectangles are closed-open pixel intervals [x, x+width) x [y, y+height) in a
top-left-origin coordinate system (x grows rightward, y grows downward).
Closed-open intervals make areas additive and let every area operation agree
exactly with counting pixels in a rasterized mask.

All area computations use exact integer arithmetic so results are
reproducible bit-for-bit across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True, order=True)
class Rect:
    """Axis-aligned box with integer pixel coordinates and positive size."""

    x: int
    y: int
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"degenerate rect: width={self.width}, height={self.height}")

    @property
    def x2(self) -> int:
        """Exclusive right edge."""
        return self.x + self.width

    @property
    def y2(self) -> int:
        """Exclusive bottom edge."""
        return self.y + self.height

    @property
    def area(self) -> int:
        return self.width * self.height

    def translated(self, dx: int, dy: int) -> "Rect":
        return Rect(self.x + dx, self.y + dy, self.width, self.height)

    def clipped(self, frame_width: int, frame_height: int) -> "Rect | None":
        """Intersection with [0, frame_width) x [0, frame_height); None if empty."""
        x0 = max(self.x, 0)
        y0 = max(self.y, 0)
        x1 = min(self.x2, frame_width)
        y1 = min(self.y2, frame_height)
        if x1 - x0 < 1 or y1 - y0 < 1:
            return None
        return Rect(x0, y0, x1 - x0, y1 - y0)


@dataclass(frozen=True)
class RectRegion:
    """A pixel region given as the set union of possibly overlapping rects.

    Area and intersection results are independent of rect order and of
    duplicated rects.
    """

    rects: tuple[Rect, ...] = ()

    @classmethod
    def of(cls, rects: Iterable[Rect]) -> "RectRegion":
        return cls(tuple(rects))

    @property
    def area(self) -> int:
        return union_area(self)


def intersect_area(a: Rect, b: Rect) -> int:
    """Area of the geometric intersection of two rects; 0 if disjoint."""
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0
    return iw * ih


def intersect_rect(a: Rect, b: Rect) -> Rect | None:
    """Geometric intersection of two rects; None if empty."""
    x0 = max(a.x, b.x)
    y0 = max(a.y, b.y)
    x1 = min(a.x2, b.x2)
    y1 = min(a.y2, b.y2)
    if x1 - x0 < 1 or y1 - y0 < 1:
        return None
    return Rect(x0, y0, x1 - x0, y1 - y0)


def iou(a: Rect, b: Rect) -> float:
    """Intersection over union; 1.0 iff the boxes coincide, 0.0 if disjoint."""
    inter = intersect_area(a, b)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


def _coerce_rects(region: "RectRegion | Iterable[Rect]") -> tuple[Rect, ...]:
    if isinstance(region, RectRegion):
        return region.rects
    return tuple(region)


def _union_area(boxes: Sequence[tuple]) -> int | float:
    """Union area of (x0, y0, x1, y1) boxes by a coordinate-compression sweep.

    Splits the x axis at every box edge; within each vertical slab the covered
    y extent is the merged length of the y intervals of boxes spanning the
    slab. Works on ints (exactly) and floats alike.
    """
    if not boxes:
        return 0
    xs = sorted({b[0] for b in boxes} | {b[2] for b in boxes})
    total = 0
    for x0, x1 in zip(xs, xs[1:]):
        spans = sorted((b[1], b[3]) for b in boxes if b[0] <= x0 and b[2] >= x1)
        covered = 0
        cur_lo = cur_hi = None
        for lo, hi in spans:
            if cur_hi is None or lo > cur_hi:
                if cur_hi is not None:
                    covered += cur_hi - cur_lo
                cur_lo, cur_hi = lo, hi
            elif hi > cur_hi:
                cur_hi = hi
        if cur_hi is not None:
            covered += cur_hi - cur_lo
        total += (x1 - x0) * covered
    return total


def union_area(region: "RectRegion | Iterable[Rect]") -> int:
    """Exact area of the set union of the region's rects."""
    rects = _coerce_rects(region)
    return int(_union_area([(r.x, r.y, r.x2, r.y2) for r in rects]))


def region_intersection_area(a: "RectRegion | Iterable[Rect]", b: "RectRegion | Iterable[Rect]") -> int:
    """Exact area of (union of a) intersected with (union of b).

    Intersection distributes over union, so the result is the union area of
    all pairwise rect intersections.
    """
    rects_a = _coerce_rects(a)
    rects_b = _coerce_rects(b)
    pieces = []
    for ra in rects_a:
        for rb in rects_b:
            piece = intersect_rect(ra, rb)
            if piece is not None:
                pieces.append(piece)
    return union_area(pieces)


def nms(
    boxes: Sequence[tuple[Rect, float]],
    iou_threshold: float,
) -> list[tuple[Rect, float]]:
    """Greedy non-maximum suppression in descending score order.

    A box is suppressed when its IoU with an already kept box exceeds the
    threshold. Ties in score are broken by input order, so the result is
    deterministic. Output is sorted by descending score.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise ValueError(f"iou_threshold must be in (0, 1), got {iou_threshold}")
    for _, score in boxes:
        if not math.isfinite(score):
            raise ValueError(f"non-finite score: {score}")
    order = sorted(range(len(boxes)), key=lambda i: (-boxes[i][1], i))
    kept: list[tuple[Rect, float]] = []
    for i in order:
        box, score = boxes[i]
        if all(iou(box, k) <= iou_threshold for k, _ in kept):
            kept.append((box, score))
    return kept
