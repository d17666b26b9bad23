"""Core image types, 8-bit conversion, PNG I/O and dataset layout.

Two array conventions are used throughout the toolkit:

* ``Image8``: ``uint8`` array of shape (H, W, 3), the on-disk form.
* ``Image``: ``float64`` array of shape (H, W, 3) with values in [0, 1],
  the processing form.

Datasets live under ``<root>/hr``, ``<root>/lr_x{s}_track{t}`` with files
named ``<scene>_L.png`` / ``<scene>_R.png``.  Only 8-bit RGB PNG is accepted;
bit depth and colour type are checked against the raw IHDR bytes because
decoders happily truncate 16-bit files to 8 bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .errors import (
    DecodeError,
    DimensionMismatch,
    EmptyResult,
    MissingView,
    UnsupportedFormat,
)

HR_DIRNAME = "hr"
VIEW_SUFFIXES = ("L", "R")

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def lr_dirname(track: int, scale: int = 4) -> str:
    return f"lr_x{scale}_track{track}"


@dataclass(frozen=True)
class SceneId:
    """Zero-padded numeric scene identifier, e.g. index 42 -> '0042'."""

    index: int
    split: str = "train"

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"scene index must be non-negative, got {self.index}")

    @property
    def stem(self) -> str:
        return f"{self.index:04d}"

    @classmethod
    def parse(cls, text: str, split: str = "train") -> "SceneId":
        if not text.isdigit():
            raise ValueError(f"scene id must be digits, got {text!r}")
        return cls(index=int(text), split=split)


class StereoPair:
    """A left/right image pair; both views always share shape and dtype."""

    __slots__ = ("left", "right")

    def __init__(self, left: np.ndarray, right: np.ndarray):
        left = np.asarray(left)
        right = np.asarray(right)
        if left.shape != right.shape:
            raise DimensionMismatch(
                f"stereo views differ in shape: {left.shape} vs {right.shape}"
            )
        if left.dtype != right.dtype:
            raise DimensionMismatch(
                f"stereo views differ in dtype: {left.dtype} vs {right.dtype}"
            )
        self.left = left
        self.right = right

    @property
    def shape(self) -> tuple:
        return self.left.shape

    @property
    def views(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.left, self.right)

    def map(self, fn) -> "StereoPair":
        """Apply fn to both views, left first."""
        return StereoPair(fn(self.left), fn(self.right))

    def __repr__(self) -> str:  # pragma: no cover
        return f"StereoPair(shape={self.left.shape}, dtype={self.left.dtype})"


def validate_image8(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise UnsupportedFormat(f"expected uint8 image, got dtype {img.dtype}")
    if img.ndim != 3 or img.shape[2] != 3:
        raise UnsupportedFormat(f"expected (H, W, 3) image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise EmptyResult("image has zero pixels")
    return img


def to_float(img8: np.ndarray) -> np.ndarray:
    """uint8 -> float64 in [0, 1] (divide by 255)."""
    validate_image8(img8)
    return img8.astype(np.float64) / 255.0


def quantize8(img: np.ndarray) -> np.ndarray:
    """float [0,1] -> uint8: clamp, scale by 255, round half away from zero.

    Values are non-negative after the clamp, so floor(x + 0.5) implements
    round-half-away-from-zero; 0.5 * 255 = 127.5 maps to 128.
    """
    img = np.asarray(img, dtype=np.float64)
    return np.floor(np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def crop_to_multiple(img: np.ndarray, s: int) -> np.ndarray:
    """Crop bottom/right so both spatial dims are divisible by s."""
    if s < 1:
        raise ValueError(f"multiple must be >= 1, got {s}")
    h, w = img.shape[0], img.shape[1]
    h2, w2 = (h // s) * s, (w // s) * s
    if h2 == 0 or w2 == 0:
        raise EmptyResult(f"cropping {h}x{w} to a multiple of {s} leaves no pixels")
    return img[:h2, :w2].copy()


def load_image(path: str | Path) -> np.ndarray:
    """Load an 8-bit RGB PNG as an Image8 array.

    The IHDR bytes are inspected before decoding: bit depth (offset 24) must
    be 8 and colour type (offset 25) must be 2 (truecolour).
    """
    path = Path(path)
    with open(path, "rb") as f:
        head = f.read(26)
    if len(head) < 26 or not head.startswith(_PNG_SIGNATURE):
        raise UnsupportedFormat(f"{path}: not a PNG file")
    if head[12:16] != b"IHDR":
        raise DecodeError(f"{path}: first chunk is not IHDR")
    bit_depth, color_type = head[24], head[25]
    if bit_depth != 8 or color_type != 2:
        raise UnsupportedFormat(
            f"{path}: need 8-bit RGB PNG, got bit depth {bit_depth}, colour type {color_type}"
        )
    try:
        with PILImage.open(path) as im:
            arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except OSError as e:
        raise DecodeError(f"{path}: {e}") from e
    return validate_image8(arr)


def save_image(img8: np.ndarray, path: str | Path) -> None:
    validate_image8(img8)
    path = Path(path)
    PILImage.fromarray(img8, mode="RGB").save(path, format="PNG")


def view_filename(stem: str, view: str) -> str:
    return f"{stem}_{view}.png"


def load_stereo_pair(
    root_dir: str | Path,
    scene: "SceneId | str",
    suffixes: tuple[str, str] = VIEW_SUFFIXES,
) -> StereoPair:
    """Load both views of a scene as float images in [0, 1]."""
    root = Path(root_dir)
    stem = scene.stem if isinstance(scene, SceneId) else str(scene)
    paths = [root / view_filename(stem, v) for v in suffixes]
    missing = [p for p in paths if not p.is_file()]
    if missing:
        names = ", ".join(p.stem for p in missing)
        raise MissingView(f"scene {stem}: missing view(s) {names}")
    left, right = (load_image(p) for p in paths)
    if left.shape != right.shape:
        raise DimensionMismatch(
            f"scene {stem}: views differ in shape {left.shape} vs {right.shape}"
        )
    return StereoPair(to_float(left), to_float(right))


def save_stereo_pair(
    pair: StereoPair,
    out_dir: str | Path,
    stem: str,
    suffixes: tuple[str, str] = VIEW_SUFFIXES,
) -> list[Path]:
    """Quantize both views and write PNGs; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for view, suffix in zip(pair.views, suffixes):
        img8 = view if view.dtype == np.uint8 else quantize8(view)
        p = out / view_filename(stem, suffix)
        save_image(img8, p)
        written.append(p)
    return written


def list_scenes(dir_path: str | Path) -> list[str]:
    """Sorted scene stems found in a directory (from the *_L.png files)."""
    d = Path(dir_path)
    return sorted(p.name[: -len("_L.png")] for p in d.glob("*_L.png"))
