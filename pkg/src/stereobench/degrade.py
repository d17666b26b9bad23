"""Synthesis of low-resolution stereo pairs.

Track 1 is clean bicubic downscaling (antialiased), then 8-bit quantisation:

    lr = quantize(bicubic_down(hr, s))

Track 2 composes blur, plain bicubic decimation (no antialias widening; the
blur already band-limits), additive Gaussian sensor noise in the continuous
domain, 8-bit quantisation and a JPEG round trip:

    lr = jpeg(quantize(bicubic_down(hr * k, s) + n)),  n ~ N(0, (sigma/255)^2)

Both views of a pair are processed left first, right second, drawing noise
from the same stream, so a scene's outputs are a pure function of
(hr, config, seed).
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, replace

import numpy as np
import scipy.signal

from .errors import InvalidKernelSize, KernelTooLarge, NotDivisible
from .images import StereoPair, quantize8, to_float
from .jpeg import jpeg_roundtrip
from .resize import bicubic_resize
from .rng import DEFAULT_SEED, Rng

# fault injection knob used by the self-test's mutation check: setting this
# environment variable to "swap-blur-noise" applies sensor noise before the
# blur in track 2, which a correct-order recomposition must detect
FAULT_ENV_VAR = "STEREOBENCH_INJECT_FAULT"
FAULT_SWAP_BLUR_NOISE = "swap-blur-noise"


@dataclass(frozen=True)
class DegradationConfig:
    track: int = 1
    scale: int = 4
    blur_sigma: float = 1.5
    blur_kernel_size: int = 21
    noise_sigma: float = 5.0
    jpeg_quality: int = 70
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.track not in (1, 2):
            raise ValueError(f"track must be 1 or 2, got {self.track}")
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        if self.blur_kernel_size < 3 or self.blur_kernel_size % 2 == 0:
            raise InvalidKernelSize(
                f"blur kernel size must be odd and >= 3, got {self.blur_kernel_size}"
            )
        if self.blur_sigma <= 0:
            raise ValueError(f"blur sigma must be positive, got {self.blur_sigma}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise sigma must be >= 0, got {self.noise_sigma}")
        if not 1 <= self.jpeg_quality <= 100:
            raise ValueError(f"jpeg quality must be in [1, 100], got {self.jpeg_quality}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "DegradationConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "DegradationConfig":
        with open(path) as f:
            return cls.from_json(json.load(f))

    def override(self, **kwargs) -> "DegradationConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def gaussian_kernel(sigma: float, size: int) -> np.ndarray:
    """Normalised isotropic Gaussian tap grid of odd size."""
    if size < 3 or size % 2 == 0:
        raise InvalidKernelSize(f"kernel size must be odd and >= 3, got {size}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    k = np.outer(g, g)
    return k / k.sum()


def convolve2d(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """2-D correlation with symmetric boundary padding, per channel.

    Output has the image's shape.  For the symmetric Gaussian kernels used
    here correlation and convolution coincide.
    """
    img = np.asarray(img, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    kh, kw = kernel.shape
    if kh >= img.shape[0] or kw >= img.shape[1]:
        raise KernelTooLarge(
            f"kernel {kernel.shape} does not fit image {img.shape[:2]}"
        )
    ph, pw = kh // 2, kw // 2
    flipped = kernel[::-1, ::-1]  # correlation via convolution
    if img.ndim == 2:
        padded = np.pad(img, ((ph, ph), (pw, pw)), mode="symmetric")
        return scipy.signal.fftconvolve(padded, flipped, mode="valid")
    padded = np.pad(img, ((ph, ph), (pw, pw), (0, 0)), mode="symmetric")
    out = np.empty_like(img)
    for c in range(img.shape[2]):
        out[:, :, c] = scipy.signal.fftconvolve(padded[:, :, c], flipped, mode="valid")
    return out


def add_gaussian_noise(img: np.ndarray, noise_sigma: float, rng: Rng) -> np.ndarray:
    """Additive white Gaussian noise; sigma is on the 8-bit scale."""
    if noise_sigma < 0:
        raise ValueError(f"noise sigma must be >= 0, got {noise_sigma}")
    img = np.asarray(img, dtype=np.float64)
    return img + rng.normal(size=img.shape, sigma=noise_sigma / 255.0)


def _check_divisible(pair: StereoPair, s: int) -> None:
    h, w = pair.shape[0], pair.shape[1]
    if h % s or w % s:
        raise NotDivisible(f"HR dims {h}x{w} not divisible by scale {s}")


def degrade_track1(hr: StereoPair, s: int = 4) -> StereoPair:
    """Bicubic track: antialiased downscale, quantise, back to float."""
    _check_divisible(hr, s)
    h, w = hr.shape[0] // s, hr.shape[1] // s
    return hr.map(lambda v: to_float(quantize8(bicubic_resize(v, h, w, antialias=True))))


def degrade_track2(hr: StereoPair, cfg: DegradationConfig, rng: Rng) -> StereoPair:
    """Realistic track: blur, decimate, noise, quantise, JPEG round trip."""
    _check_divisible(hr, cfg.scale)
    swap = os.environ.get(FAULT_ENV_VAR) == FAULT_SWAP_BLUR_NOISE
    kernel = gaussian_kernel(cfg.blur_sigma, cfg.blur_kernel_size)
    h, w = hr.shape[0] // cfg.scale, hr.shape[1] // cfg.scale
    views = []
    for view in hr.views:  # left first, right second, one shared noise stream
        if swap:
            view = add_gaussian_noise(view, cfg.noise_sigma, rng)
            blurred = convolve2d(view, kernel)
            down = bicubic_resize(blurred, h, w, antialias=False)
        else:
            blurred = convolve2d(view, kernel)
            down = bicubic_resize(blurred, h, w, antialias=False)
            down = add_gaussian_noise(down, cfg.noise_sigma, rng)
        coded = jpeg_roundtrip(quantize8(down), cfg.jpeg_quality)
        views.append(to_float(coded))
    return StereoPair(*views)


def degrade_pair(hr: StereoPair, cfg: DegradationConfig, rng: Rng | None = None) -> StereoPair:
    """Dispatch on cfg.track; track 2 requires an rng (derived per scene)."""
    if cfg.track == 1:
        return degrade_track1(hr, cfg.scale)
    if rng is None:
        rng = Rng(cfg.seed)
    return degrade_track2(hr, cfg, rng)
