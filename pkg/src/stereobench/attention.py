"""Reference stereo attention mechanisms and sub-pixel reshuffling.

Rectified stereo means corresponding points share a scanline, so attention
is restricted to rows.  Disparity is non-negative: the right-view pixel at
column x corresponds to the left-view pixel at column x + d.

pam_forward  computes plain (projection-free) parallax attention: row-wise
             score S[y, i, j] = <f_l[y, i], f_r[y, j]> / sqrt(C), softmax
             over the source view's columns, warped features, and cycle
             validity masks from the attention round trip
             (attn_r2l @ attn_l2r) diagonal >= threshold.

scam_forward is the gated bidirectional cross-attention residual used inside
             stereo SR blocks: per-view layer norm, shared query/key
             projections (the left view's query matrix is the right view's
             key matrix and vice versa), per-view values, zero-initialised
             channel gates so a fresh block is an identity function.

pixel_shuffle packs channels into space: (H, W, C*r^2) -> (rH, rW, C),
             channel c*r^2 block order (C, r, r) as in sub-pixel conv.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChannelsNotDivisible, ParamMismatch, ShapeMismatch
from .rng import Rng

LAYER_NORM_EPS = 1e-6
DEFAULT_MASK_THRESHOLD = 0.1


def _check_feature_pair(f_l: np.ndarray, f_r: np.ndarray) -> tuple[int, int, int]:
    f_l, f_r = np.asarray(f_l), np.asarray(f_r)
    if f_l.ndim != 3 or f_r.ndim != 3:
        raise ShapeMismatch(f"feature maps must be (H, W, C), got {f_l.shape} and {f_r.shape}")
    if f_l.shape != f_r.shape:
        raise ShapeMismatch(f"view feature shapes differ: {f_l.shape} vs {f_r.shape}")
    return f_l.shape


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax."""
    z = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


@dataclass(frozen=True)
class PamOutput:
    attn_r2l: np.ndarray   # (H, W, W): left column i attends right column j
    attn_l2r: np.ndarray   # (H, W, W): right column i attends left column j
    warped_r: np.ndarray   # right features warped into the left view
    warped_l: np.ndarray   # left features warped into the right view
    valid_l: np.ndarray    # (H, W) bool, cycle-consistent left positions
    valid_r: np.ndarray    # (H, W) bool


def pam_forward(
    f_l: np.ndarray,
    f_r: np.ndarray,
    mask_threshold: float = DEFAULT_MASK_THRESHOLD,
) -> PamOutput:
    """Row-wise parallax attention between rectified views."""
    h, w, c = _check_feature_pair(f_l, f_r)
    f_l = np.asarray(f_l, dtype=np.float64)
    f_r = np.asarray(f_r, dtype=np.float64)
    scores = np.einsum("ywc,yvc->ywv", f_l, f_r) / np.sqrt(c)
    attn_r2l = softmax(scores, axis=-1)
    attn_l2r = softmax(scores.transpose(0, 2, 1), axis=-1)
    warped_r = np.einsum("ywv,yvc->ywc", attn_r2l, f_r)
    warped_l = np.einsum("ywv,yvc->ywc", attn_l2r, f_l)
    cycle_l = np.einsum("ywv,yvu->ywu", attn_r2l, attn_l2r)
    cycle_r = np.einsum("ywv,yvu->ywu", attn_l2r, attn_r2l)
    diag = np.arange(w)
    valid_l = cycle_l[:, diag, diag] >= mask_threshold
    valid_r = cycle_r[:, diag, diag] >= mask_threshold
    return PamOutput(attn_r2l, attn_l2r, warped_r, warped_l, valid_l, valid_r)


def layer_norm(f: np.ndarray, scale: np.ndarray, shift: np.ndarray,
               eps: float = LAYER_NORM_EPS) -> np.ndarray:
    """Channel-wise layer norm at each spatial position."""
    f = np.asarray(f, dtype=np.float64)
    if scale.shape != (f.shape[-1],) or shift.shape != (f.shape[-1],):
        raise ParamMismatch(
            f"norm affine shapes {scale.shape}/{shift.shape} do not match C={f.shape[-1]}"
        )
    mu = f.mean(axis=-1, keepdims=True)
    var = f.var(axis=-1, keepdims=True)
    return (f - mu) / np.sqrt(var + eps) * scale + shift


@dataclass
class ScamParams:
    """Parameters of one gated stereo cross-attention block.

    w_q projects the left view's normed features to queries and w_k the
    right view's to keys; both score matrices reuse the same product, so
    swapping views swaps the roles of w_q and w_k.
    """

    norm_scale_l: np.ndarray
    norm_shift_l: np.ndarray
    norm_scale_r: np.ndarray
    norm_shift_r: np.ndarray
    w_q: np.ndarray       # (C, C)
    w_k: np.ndarray       # (C, C)
    w_v_l: np.ndarray     # (C, C) value projection of the left view
    w_v_r: np.ndarray     # (C, C)
    gamma_l: np.ndarray   # (C,) gate on the r->l message
    gamma_r: np.ndarray   # (C,) gate on the l->r message

    @classmethod
    def init(cls, channels: int, rng: Rng | None = None) -> "ScamParams":
        """Fresh block: random projections, zero gates (identity function)."""
        rng = rng or Rng(0)
        std = channels ** -0.5
        shape = (channels, channels)
        return cls(
            norm_scale_l=np.ones(channels),
            norm_shift_l=np.zeros(channels),
            norm_scale_r=np.ones(channels),
            norm_shift_r=np.zeros(channels),
            w_q=rng.normal(size=shape, sigma=std),
            w_k=rng.normal(size=shape, sigma=std),
            w_v_l=rng.normal(size=shape, sigma=std),
            w_v_r=rng.normal(size=shape, sigma=std),
            gamma_l=np.zeros(channels),
            gamma_r=np.zeros(channels),
        )

    def validate(self, channels: int) -> None:
        mats = ("w_q", "w_k", "w_v_l", "w_v_r")
        vecs = ("norm_scale_l", "norm_shift_l", "norm_scale_r", "norm_shift_r",
                "gamma_l", "gamma_r")
        for name in mats:
            if getattr(self, name).shape != (channels, channels):
                raise ParamMismatch(f"{name} must be ({channels}, {channels})")
        for name in vecs:
            if getattr(self, name).shape != (channels,):
                raise ParamMismatch(f"{name} must be ({channels},)")

    def swap_views(self) -> "ScamParams":
        """The same block with the two views' roles exchanged."""
        return ScamParams(
            norm_scale_l=self.norm_scale_r, norm_shift_l=self.norm_shift_r,
            norm_scale_r=self.norm_scale_l, norm_shift_r=self.norm_shift_l,
            w_q=self.w_k, w_k=self.w_q,
            w_v_l=self.w_v_r, w_v_r=self.w_v_l,
            gamma_l=self.gamma_r, gamma_r=self.gamma_l,
        )


def scam_forward(
    f_l: np.ndarray, f_r: np.ndarray, params: ScamParams
) -> tuple[np.ndarray, np.ndarray]:
    """Bidirectional gated cross-attention; returns updated (left, right)."""
    h, w, c = _check_feature_pair(f_l, f_r)
    params.validate(c)
    f_l = np.asarray(f_l, dtype=np.float64)
    f_r = np.asarray(f_r, dtype=np.float64)
    q = layer_norm(f_l, params.norm_scale_l, params.norm_shift_l) @ params.w_q
    k = layer_norm(f_r, params.norm_scale_r, params.norm_shift_r) @ params.w_k
    v_l = f_l @ params.w_v_l
    v_r = f_r @ params.w_v_r
    scores = np.einsum("ywc,yvc->ywv", q, k) * (c ** -0.5)
    msg_r2l = np.einsum("ywv,yvc->ywc", softmax(scores, axis=-1), v_r)
    msg_l2r = np.einsum("ywv,yvc->ywc", softmax(scores.transpose(0, 2, 1), axis=-1), v_l)
    out_l = f_l + params.gamma_l * msg_r2l
    out_r = f_r + params.gamma_r * msg_l2r
    return out_l, out_r


def pixel_shuffle(f: np.ndarray, r: int) -> np.ndarray:
    """(H, W, C*r^2) -> (rH, rW, C); inverse of pixel_unshuffle."""
    f = np.asarray(f)
    if f.ndim != 3:
        raise ShapeMismatch(f"expected (H, W, C) feature map, got {f.shape}")
    if r < 1:
        raise ValueError(f"upscaling factor must be >= 1, got {r}")
    h, w, c_in = f.shape
    if c_in % (r * r):
        raise ChannelsNotDivisible(f"channels {c_in} not divisible by r^2 = {r * r}")
    c = c_in // (r * r)
    out = f.reshape(h, w, c, r, r)
    out = out.transpose(0, 3, 1, 4, 2)  # h, ry, w, rx, c
    return out.reshape(h * r, w * r, c)


def pixel_unshuffle(f: np.ndarray, r: int) -> np.ndarray:
    """(rH, rW, C) -> (H, W, C*r^2); inverse of pixel_shuffle."""
    f = np.asarray(f)
    if f.ndim != 3:
        raise ShapeMismatch(f"expected (H, W, C) feature map, got {f.shape}")
    if r < 1:
        raise ValueError(f"upscaling factor must be >= 1, got {r}")
    hr, wr, c = f.shape
    if hr % r or wr % r:
        raise ChannelsNotDivisible(f"spatial dims {hr}x{wr} not divisible by r = {r}")
    h, w = hr // r, wr // r
    out = f.reshape(h, r, w, r, c)
    out = out.transpose(0, 2, 4, 1, 3)  # h, w, c, ry, rx
    return out.reshape(h, w, c * r * r)
