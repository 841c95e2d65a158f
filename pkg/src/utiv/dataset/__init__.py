"""Ground-truth data model, XML round-trip, loading, statistics and splits."""

from utiv.dataset.corpus import (
    Issue,
    dataset_stats,
    load_dataset,
    split_dataset,
    stats_to_csv,
    validate_dataset,
)
from utiv.dataset.dedup import dedup_frames, dhash, hamming_distance
from utiv.dataset.model import (
    SCRIPTS,
    ChannelStats,
    Dataset,
    DatasetStats,
    FrameAnnotation,
    Split,
    TextLine,
)
from utiv.dataset.xml_io import parse_frame_annotation, write_frame_annotation

__all__ = [
    "SCRIPTS",
    "ChannelStats",
    "Dataset",
    "DatasetStats",
    "FrameAnnotation",
    "Issue",
    "Split",
    "TextLine",
    "dataset_stats",
    "dedup_frames",
    "dhash",
    "hamming_distance",
    "load_dataset",
    "parse_frame_annotation",
    "split_dataset",
    "stats_to_csv",
    "validate_dataset",
    "write_frame_annotation",
]
