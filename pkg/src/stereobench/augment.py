"""Stereo-consistent data augmentation.

Every op transforms the HR pair and the LR pair together so that epipolar
geometry survives: horizontal mirroring must also exchange the views
(disparity stays non-negative), channel shuffles use one permutation for
all four images, and crops/boxes are drawn in LR coordinates then scaled by
s for the HR pair.  Rotation is deliberately not offered: it would move
correspondences off the scanlines.

Mixing ops (mixup, cutmix, cutmixup) blend with a second sample; mixup and
cutmixup draw their coefficient from Beta(1.2, 1.2), cutmix pastes a
uniformly sized and positioned box.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ScaleMismatch, ShapeMismatch, UnsupportedOp
from .images import StereoPair
from .rng import Rng

MIXUP_ALPHA = 1.2

SUPPORTED_OPS = (
    "hflip_swap", "vflip", "rgb_shuffle", "hshift", "mixup", "cutmix", "cutmixup",
)

_MIX_OPS = frozenset({"mixup", "cutmix", "cutmixup"})


def infer_scale(hr: StereoPair, lr: StereoPair) -> int:
    hh, hw = hr.shape[:2]
    lh, lw = lr.shape[:2]
    if hh % lh or hw % lw or hh // lh != hw // lw:
        raise ScaleMismatch(f"HR {hh}x{hw} is not an integer multiple of LR {lh}x{lw}")
    return hh // lh


def _gamma_sample(rng: Rng, alpha: float) -> float:
    """Marsaglia-Tsang sampler, valid for alpha >= 1."""
    d = alpha - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = rng.normal()
        v = (1.0 + c * x) ** 3
        if v <= 0.0:
            continue
        u = rng.uniform()
        if u < 1.0 - 0.0331 * x ** 4:
            return d * v
        if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v


def beta_sample(rng: Rng, a: float = MIXUP_ALPHA, b: float = MIXUP_ALPHA) -> float:
    x = _gamma_sample(rng, a)
    y = _gamma_sample(rng, b)
    return x / (x + y)


def _hflip_swap(hr, lr, rng, other, s):
    flip = lambda img: img[:, ::-1].copy()
    return (
        StereoPair(flip(hr.right), flip(hr.left)),
        StereoPair(flip(lr.right), flip(lr.left)),
    )


def _vflip(hr, lr, rng, other, s):
    flip = lambda img: img[::-1].copy()
    return hr.map(flip), lr.map(flip)


def _rgb_shuffle(hr, lr, rng, other, s):
    perm = rng.permutation(3)
    shuffle = lambda img: img[:, :, perm].copy()
    return hr.map(shuffle), lr.map(shuffle)


def _hshift(hr, lr, rng, other, s):
    # common left crop: k LR columns, s*k HR columns, both views alike
    w_lr = lr.shape[1]
    k = rng.randint(0, max(w_lr // 4, 1) + 1)
    if k == 0:
        return hr, lr
    return hr.map(lambda img: img[:, s * k:].copy()), lr.map(lambda img: img[:, k:].copy())


def _require_other(op, other, hr, lr):
    if other is None:
        raise UnsupportedOp(f"{op} needs a second sample (other=...)")
    hr2, lr2 = other
    if hr2.shape != hr.shape or lr2.shape != lr.shape:
        raise ShapeMismatch(
            f"{op}: second sample dims {hr2.shape}/{lr2.shape} "
            f"do not match {hr.shape}/{lr.shape}"
        )
    return hr2, lr2


def _mixup(hr, lr, rng, other, s):
    hr2, lr2 = _require_other("mixup", other, hr, lr)
    lam = beta_sample(rng)
    blend = lambda a, b: lam * a + (1.0 - lam) * b
    return (
        StereoPair(blend(hr.left, hr2.left), blend(hr.right, hr2.right)),
        StereoPair(blend(lr.left, lr2.left), blend(lr.right, lr2.right)),
    )


def _draw_box(rng: Rng, h: int, w: int) -> tuple[int, int, int, int]:
    """Uniform box in LR coordinates: size and position both uniform."""
    bh = rng.randint(1, h + 1)
    bw = rng.randint(1, w + 1)
    top = rng.randint(0, h - bh + 1)
    left = rng.randint(0, w - bw + 1)
    return top, left, bh, bw


def _paste(a: np.ndarray, b: np.ndarray, box, s: int, lam: float | None) -> np.ndarray:
    top, left, bh, bw = (v * s for v in box)
    out = a.copy()
    patch = b[top:top + bh, left:left + bw]
    if lam is None:
        out[top:top + bh, left:left + bw] = patch
    else:
        out[top:top + bh, left:left + bw] = (
            lam * a[top:top + bh, left:left + bw] + (1.0 - lam) * patch
        )
    return out


def _cutmix_impl(op, hr, lr, rng, other, s, lam):
    hr2, lr2 = _require_other(op, other, hr, lr)
    box = _draw_box(rng, lr.shape[0], lr.shape[1])
    return (
        StereoPair(_paste(hr.left, hr2.left, box, s, lam),
                   _paste(hr.right, hr2.right, box, s, lam)),
        StereoPair(_paste(lr.left, lr2.left, box, 1, lam),
                   _paste(lr.right, lr2.right, box, 1, lam)),
    )


def _cutmix(hr, lr, rng, other, s):
    return _cutmix_impl("cutmix", hr, lr, rng, other, s, lam=None)


def _cutmixup(hr, lr, rng, other, s):
    lam = beta_sample(rng)
    return _cutmix_impl("cutmixup", hr, lr, rng, other, s, lam=lam)


_DISPATCH = {
    "hflip_swap": _hflip_swap,
    "vflip": _vflip,
    "rgb_shuffle": _rgb_shuffle,
    "hshift": _hshift,
    "mixup": _mixup,
    "cutmix": _cutmix,
    "cutmixup": _cutmixup,
}


def augment(
    hr: StereoPair,
    lr: StereoPair,
    ops,
    rng: Rng | None = None,
    other: tuple[StereoPair, StereoPair] | None = None,
) -> tuple[StereoPair, StereoPair]:
    """Apply ops in order to an (HR, LR) sample; returns the new sample.

    ops is a sequence of names from SUPPORTED_OPS.  Anything else (notably
    "rotate") raises UnsupportedOp.  rng is required only by the stochastic
    ops; mixing ops additionally need other = (hr2, lr2).
    """
    s = infer_scale(hr, lr)
    rng = rng or Rng(0)
    for op in ops:
        fn = _DISPATCH.get(op)
        if fn is None:
            raise UnsupportedOp(
                f"unsupported augmentation {op!r}; supported: {', '.join(SUPPORTED_OPS)}"
            )
        hr, lr = fn(hr, lr, rng, other, s)
    return hr, lr
