"""Toolkit for building and evaluating caption-text detection datasets.

Subsystems: exact rectangle geometry, anchor-box design, ground-truth XML
datasets, detector-output ingestion, area-based precision/recall evaluation,
script-identification scoring, experiment harnesses, an annotation service
and a command-line interface.
"""

from utiv.geometry import Rect, RectRegion, intersect_area, iou, nms, region_intersection_area, union_area

__all__ = [
    "Rect",
    "RectRegion",
    "intersect_area",
    "iou",
    "nms",
    "region_intersection_area",
    "union_area",
]

__version__ = "0.1.0"
