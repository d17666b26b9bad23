"""Shared fixtures: deterministic natural-looking images and tiny datasets."""

from __future__ import annotations

import numpy as np
import pytest

from stereobench.images import save_image


def natural_image8(h: int, w: int, seed: int) -> np.ndarray:
    """Photograph-like uint8 fixture: smooth colour fields, luma texture.

    Chroma detail is kept low-energy (as in real photos) so that 4:2:0
    chroma subsampling at top JPEG quality stays a mild distortion.
    """
    r = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    base = np.stack(
        [
            120 + 70 * np.sin(2 * np.pi * xx / 66 + r.uniform(0, 6)) * np.cos(2 * np.pi * yy / 91),
            130 + 60 * np.cos(2 * np.pi * (0.6 * xx + 0.8 * yy) / 114 + r.uniform(0, 6)),
            110 + 55 * np.sin(2 * np.pi * yy / 53 + r.uniform(0, 6)),
        ],
        axis=-1,
    )
    luma_texture = r.normal(0.0, 10.0, (h, w, 1))
    chroma_texture = r.normal(0.0, 0.8, (h, w, 3))
    return np.clip(base + luma_texture + chroma_texture, 0, 255).astype(np.uint8)


def natural_image(h: int, w: int, seed: int) -> np.ndarray:
    return natural_image8(h, w, seed).astype(np.float64) / 255.0


def natural_pair8(h: int, w: int, seed: int, disparity: int = 4):
    """(left, right) uint8 pair; right is the scene shifted by a disparity."""
    wide = natural_image8(h, w + disparity, seed)
    left = wide[:, disparity:]
    right = wide[:, :w]
    return left.copy(), right.copy()


def write_scene(dir_path, stem: str, left8: np.ndarray, right8: np.ndarray) -> None:
    dir_path.mkdir(parents=True, exist_ok=True)
    save_image(left8, dir_path / f"{stem}_L.png")
    save_image(right8, dir_path / f"{stem}_R.png")


@pytest.fixture
def hr_dataset(tmp_path):
    """Two-scene HR dataset (64x96) on disk; returns its directory."""
    d = tmp_path / "hr"
    for i in range(2):
        left, right = natural_pair8(64, 96, seed=10 + i)
        write_scene(d, f"{i:04d}", left, right)
    return d
