from __future__ import annotations

import numpy as np
import pytest
from PIL import Image

from utiv.dataset.dedup import dedup_frames, dhash, hamming_distance
from utiv.errors import DatasetError


def noise_image(seed: int, size=(160, 90)) -> Image.Image:
    rng = np.random.default_rng(seed)
    data = rng.integers(0, 256, size=(size[1], size[0], 3), dtype=np.uint8)
    return Image.fromarray(data, "RGB")


def test_dhash_is_64_bits_and_stable():
    image = noise_image(0)
    h = dhash(image)
    assert 0 <= h < 2**64
    assert dhash(image) == h


def test_hamming_distance():
    assert hamming_distance(0, 0) == 0
    assert hamming_distance(0b1011, 0b0010) == 2
    assert hamming_distance(0, 2**64 - 1) == 64


def test_identical_consecutive_frames_dropped(tmp_path):
    image = noise_image(1)
    image.save(tmp_path / "frame_000.png")
    image.save(tmp_path / "frame_001.png")
    kept = dedup_frames(tmp_path, hamming_threshold=0)
    assert [p.name for p in kept] == ["frame_000.png"]


def test_distinct_frames_all_kept(tmp_path):
    for i in range(5):
        noise_image(100 + i).save(tmp_path / f"frame_{i:03d}.png")
    kept = dedup_frames(tmp_path, hamming_threshold=0)
    assert len(kept) == 5


def test_ticker_fixture_keeps_about_one_per_run(tmp_path):
    # 100 frames, ten runs of ten identical ticker renderings
    for i in range(100):
        noise_image(1000 + i // 10).save(tmp_path / f"frame_{i:03d}.png")
    kept = dedup_frames(tmp_path, hamming_threshold=8)
    assert 8 <= len(kept) <= 12
    # the first frame of every run must survive
    assert kept[0].name == "frame_000.png"


def test_undecodable_image_skipped_with_warning(tmp_path, caplog):
    noise_image(7).save(tmp_path / "a.png")
    (tmp_path / "b.png").write_bytes(b"this is not a png")
    noise_image(8).save(tmp_path / "c.png")
    with caplog.at_level("WARNING"):
        kept = dedup_frames(tmp_path, hamming_threshold=0)
    assert [p.name for p in kept] == ["a.png", "c.png"]
    assert "b.png" in caplog.text


def test_non_image_files_ignored(tmp_path):
    noise_image(9).save(tmp_path / "a.png")
    (tmp_path / "notes.txt").write_text("hello")
    kept = dedup_frames(tmp_path, hamming_threshold=0)
    assert [p.name for p in kept] == ["a.png"]


def test_rejects_negative_threshold(tmp_path):
    with pytest.raises(ValueError):
        dedup_frames(tmp_path, hamming_threshold=-1)


def test_missing_directory(tmp_path):
    with pytest.raises(DatasetError):
        dedup_frames(tmp_path / "nope", hamming_threshold=0)
