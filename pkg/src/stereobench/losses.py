"""Training losses with closed-form gradients.

All losses return (value, gradient with respect to the prediction) so the
gradients can be validated against central finite differences without any
autograd framework.

charbonnier_loss  smooth L1: (1/N) sum_p sqrt(||hr_p - sr_p||^2 + eps^2)
                  where by default p ranges over pixels and the norm is
                  taken over the channel vector; per_channel=True instead
                  treats every scalar sample as its own term.
fft_loss          the same Charbonnier form applied to the complex spectrum:
                  terms are sqrt(|F(sr - hr)|^2 + eps^2) per frequency bin
                  and channel (unnormalised forward DFT).
l1_loss           literal L1 norm: sum of absolute differences.
bp_loss           back-projection: L1 between the bicubically downscaled
                  prediction and the degraded input, summed over both views.
total_loss        the two published combinations, both with weight 0.1:
                  "l1_bp"            L1 + 0.1 * BP
                  "charbonnier_fft"  Charbonnier + 0.1 * FFT

Term means use an anchored accumulation (t0 + mean(t - t0)) so that a
constant term array yields that constant exactly; in particular the
Charbonnier and FFT values at sr == hr equal eps to the last bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ScaleMismatch, ShapeMismatch, UnknownKind
from .images import StereoPair
from .resize import bicubic_resize, resize_adjoint

DEFAULT_EPS = 1e-3
DEFAULT_WEIGHT = 0.1


@dataclass(frozen=True)
class LossConfig:
    eps1: float = DEFAULT_EPS          # Charbonnier knee
    eps2: float = DEFAULT_EPS          # FFT-domain knee
    lambda_bp: float = DEFAULT_WEIGHT
    lambda_fft: float = DEFAULT_WEIGHT
    scale: int = 4
    charbonnier_per_channel: bool = False


def _check_pair(sr: np.ndarray, hr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sr = np.asarray(sr, dtype=np.float64)
    hr = np.asarray(hr, dtype=np.float64)
    if sr.shape != hr.shape:
        raise ShapeMismatch(f"prediction {sr.shape} vs target {hr.shape}")
    if sr.size == 0:
        raise ShapeMismatch("empty arrays")
    return sr, hr


def _anchored_mean(terms: np.ndarray) -> float:
    # exact when all terms are equal; see module docstring
    t0 = float(terms.flat[0])
    return t0 + float(np.mean(terms - t0))


def charbonnier_loss(
    sr: np.ndarray,
    hr: np.ndarray,
    eps: float = DEFAULT_EPS,
    per_channel: bool = False,
) -> tuple[float, np.ndarray]:
    """Smooth L1 penalty; returns (value, d value / d sr)."""
    sr, hr = _check_pair(sr, hr)
    d = sr - hr
    if per_channel or d.ndim < 3:
        terms = np.sqrt(d * d + eps * eps)
        grad = d / (terms * d.size)
    else:
        # one term per pixel, Euclidean norm over the channel axis
        q = np.sum(d * d, axis=-1)
        terms = np.sqrt(q + eps * eps)
        n = terms.size
        grad = d / (terms[..., None] * n)
    return _anchored_mean(terms), grad


def fft_loss(
    sr: np.ndarray, hr: np.ndarray, eps: float = DEFAULT_EPS
) -> tuple[float, np.ndarray]:
    """Charbonnier penalty on the 2-D spectrum; returns (value, gradient).

    With E = F(sr - hr) per channel and A = sqrt(|E|^2 + eps^2) the value is
    mean(A) and the gradient back-transforms G = E / A:

        d mean(A) / d sr = (H*W / N) * Re(F^-1(G))
    """
    sr, hr = _check_pair(sr, hr)
    d = sr - hr
    if d.ndim == 2:
        d = d[:, :, None]
        squeeze = True
    elif d.ndim == 3:
        squeeze = False
    else:
        raise ShapeMismatch(f"expected 2-D or 3-D arrays, got shape {d.shape}")
    spec = np.fft.fft2(d, axes=(0, 1))
    mag = np.sqrt(spec.real ** 2 + spec.imag ** 2 + eps * eps)
    value = _anchored_mean(mag)
    h, w = d.shape[:2]
    n = mag.size
    grad = (h * w / n) * np.fft.ifft2(spec / mag, axes=(0, 1)).real
    if squeeze:
        grad = grad[:, :, 0]
    return value, grad


def l1_loss(sr: np.ndarray, hr: np.ndarray) -> tuple[float, np.ndarray]:
    """Literal L1 norm (sum of absolute differences) and its subgradient."""
    sr, hr = _check_pair(sr, hr)
    d = sr - hr
    return float(np.abs(d).sum()), np.sign(d)


def _check_scale(sr_shape, lr_shape, s: int) -> None:
    if sr_shape[0] != s * lr_shape[0] or sr_shape[1] != s * lr_shape[1]:
        raise ScaleMismatch(
            f"SR {sr_shape[:2]} is not {s}x the LR {lr_shape[:2]}"
        )


def bp_loss(
    sr: StereoPair, lr: StereoPair, s: int = 4
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Back-projection consistency over both views.

    value = sum_views ||down(sr_view, s) - lr_view||_1 with the same
    antialiased bicubic operator as the track-1 degradation; gradients come
    from the exact adjoint of that operator.
    """
    _check_scale(sr.shape, lr.shape, s)
    lh, lw = lr.shape[:2]
    value = 0.0
    grads = []
    for sr_view, lr_view in zip(sr.views, lr.views):
        down = bicubic_resize(sr_view, lh, lw, antialias=True)
        diff = down - np.asarray(lr_view, dtype=np.float64)
        value += float(np.abs(diff).sum())
        grads.append(resize_adjoint(np.sign(diff), sr.shape[0], sr.shape[1], antialias=True))
    return value, (grads[0], grads[1])


LOSS_KINDS = ("l1_bp", "charbonnier_fft")


def total_loss(
    kind: str,
    sr: StereoPair,
    hr: StereoPair,
    lr: StereoPair | None = None,
    cfg: LossConfig = LossConfig(),
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """One of the two published training objectives on a stereo pair.

    "l1_bp" needs the degraded pair lr and scale cfg.scale; both of its
    terms are literal sums.  "charbonnier_fft" averages the per-view
    pixel/spectrum penalties, so its value stays eps-scaled.
    """
    if kind not in LOSS_KINDS:
        raise UnknownKind(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")
    if sr.shape != hr.shape:
        raise ShapeMismatch(f"SR pair {sr.shape} vs HR pair {hr.shape}")
    if kind == "l1_bp":
        if lr is None:
            raise ValueError("l1_bp requires the degraded LR pair")
        value = 0.0
        grads = []
        bp_value, bp_grads = bp_loss(sr, lr, cfg.scale)
        for sr_view, hr_view, bp_grad in zip(sr.views, hr.views, bp_grads):
            v, g = l1_loss(sr_view, hr_view)
            value += v
            grads.append(g + cfg.lambda_bp * bp_grad)
        return value + cfg.lambda_bp * bp_value, (grads[0], grads[1])
    # charbonnier_fft: mean over the two views
    value = 0.0
    grads = []
    for sr_view, hr_view in zip(sr.views, hr.views):
        cv, cg = charbonnier_loss(sr_view, hr_view, cfg.eps1,
                                  per_channel=cfg.charbonnier_per_channel)
        fv, fg = fft_loss(sr_view, hr_view, cfg.eps2)
        value += 0.5 * (cv + cfg.lambda_fft * fv)
        grads.append(0.5 * (cg + cfg.lambda_fft * fg))
    return value, (grads[0], grads[1])
