"""Built-in verification suites for `stereobench selftest`.

Each suite re-derives an expected behaviour from primitives and checks the
production path against it, so a silent regression in one stage (for
example a reordered degradation pipeline) turns the command red.  The
pipeline-order suite in particular recomposes track 2 from its published
stages and demands bitwise equality with degrade_track2.
"""

from __future__ import annotations

import numpy as np

from .attention import ScamParams, pam_forward, pixel_shuffle, pixel_unshuffle, scam_forward
from .degrade import (
    DegradationConfig,
    add_gaussian_noise,
    convolve2d,
    degrade_track2,
    gaussian_kernel,
)
from .ensemble import ModelParams, ensemble_params
from .images import StereoPair, quantize8, to_float
from .jpeg import jpeg_roundtrip
from .losses import bp_loss, charbonnier_loss, fft_loss
from .metrics import psnr_rgb, ssim
from .resize import bicubic_resize, resize_weights
from .rng import Rng


def _texture(h: int, w: int, seed: int) -> np.ndarray:
    """Deterministic float image in [0, 1] with smooth and fine detail."""
    rng = Rng(seed)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    base = np.stack(
        [
            0.5 + 0.35 * np.sin(2 * np.pi * xx / 23) * np.cos(2 * np.pi * yy / 17),
            0.5 + 0.30 * np.cos(2 * np.pi * (xx + yy) / 31),
            0.5 + 0.25 * np.sin(2 * np.pi * yy / 13),
        ],
        axis=-1,
    )
    return np.clip(base + rng.normal(size=base.shape, sigma=0.03), 0.0, 1.0)


def _suite_blur_kernel() -> str:
    rng = Rng(11)
    for _ in range(25):
        sigma = 0.3 + 4.0 * rng.uniform()
        size = 3 + 2 * rng.randint(0, 11)
        k = gaussian_kernel(sigma, size)
        assert abs(k.sum() - 1.0) <= 1e-12, f"kernel sum {k.sum()} (sigma={sigma}, size={size})"
        assert np.allclose(k, k[::-1, ::-1]), "kernel must be centrosymmetric"
        assert np.allclose(k, k.T), "isotropic kernel must be symmetric"
    return "25 random (sigma, size) kernels normalised and symmetric"


def _suite_resize() -> str:
    rng = Rng(12)
    for _ in range(10):
        n_in = 8 + rng.randint(0, 40)
        n_out = 4 + rng.randint(0, 40)
        for aa in (True, False):
            w = resize_weights(n_in, n_out, antialias=aa)
            assert np.max(np.abs(w.sum(axis=1) - 1.0)) <= 1e-12, "rows must sum to 1"
    const = np.full((24, 17, 3), 0.37)
    out = bicubic_resize(const, 11, 29)
    assert np.max(np.abs(out - 0.37)) <= 1e-12, "constants must be preserved"
    ident = bicubic_resize(_texture(16, 16, 3), 16, 16)
    assert np.max(np.abs(ident - _texture(16, 16, 3))) <= 1e-12, "identity resize must be exact"
    return "row sums, constant preservation and identity resize hold"


def _suite_metrics() -> str:
    a = quantize8(_texture(32, 48, 21))
    b = quantize8(_texture(32, 48, 22))
    assert psnr_rgb(a, a) == float("inf"), "identical images must score inf"
    assert ssim(a, a) == 1.0, "identical images must score SSIM 1"
    assert abs(psnr_rgb(a, b) - psnr_rgb(b, a)) == 0.0, "PSNR must be symmetric"
    assert abs(ssim(a, b) - ssim(b, a)) <= 1e-12, "SSIM must be symmetric"
    shifted = np.clip(a.astype(np.int32) + 1, 0, 255).astype(np.uint8)
    assert psnr_rgb(a, shifted) > psnr_rgb(a, b), "smaller error must score higher"
    return "metric symmetry / fixed points hold"


def _fd_gradient(f, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    g = np.empty_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        xp = x.copy()
        xp[idx] += h
        xm = x.copy()
        xm[idx] -= h
        g[idx] = (f(xp) - f(xm)) / (2 * h)
    return g


def _suite_loss_gradients() -> str:
    worst = 0.0
    for seed in range(3):
        rng = Rng(100 + seed)
        hr = 0.2 + 0.6 * rng.uniform(size=(6, 6, 3))
        sr = 0.2 + 0.6 * rng.uniform(size=(6, 6, 3))
        for loss in (charbonnier_loss, fft_loss):
            _, grad = loss(sr, hr)
            fd = _fd_gradient(lambda x: loss(x, hr)[0], sr)
            err = np.max(np.abs(grad - fd)) / max(np.max(np.abs(fd)), 1e-8)
            worst = max(worst, err)
            assert err < 1e-4, f"{loss.__name__} gradient error {err:.2e}"
        lr_pair = StereoPair(0.2 + 0.6 * rng.uniform(size=(3, 3, 3)),
                             0.2 + 0.6 * rng.uniform(size=(3, 3, 3)))
        sr_pair = StereoPair(0.2 + 0.6 * rng.uniform(size=(6, 6, 3)),
                             0.2 + 0.6 * rng.uniform(size=(6, 6, 3)))
        _, (g_l, g_r) = bp_loss(sr_pair, lr_pair, 2)
        fd_l = _fd_gradient(
            lambda x: bp_loss(StereoPair(x, sr_pair.right), lr_pair, 2)[0], sr_pair.left
        )
        err = np.max(np.abs(g_l - fd_l)) / max(np.max(np.abs(fd_l)), 1e-8)
        worst = max(worst, err)
        assert err < 1e-4, f"bp_loss gradient error {err:.2e}"
    v, _ = charbonnier_loss(np.full((4, 4, 3), 0.5), np.full((4, 4, 3), 0.5))
    assert v == 1e-3, f"charbonnier at sr == hr must equal eps, got {v!r}"
    return f"analytic gradients match finite differences (worst rel err {worst:.1e})"


def _suite_pam() -> str:
    rng = Rng(30)
    h, w, c = 5, 24, 8
    # unit-norm features: the self dot product is then the strict row maximum,
    # so argmax must land exactly on the true correspondence
    f_r = rng.normal(size=(h, w, c))
    f_r /= np.linalg.norm(f_r, axis=-1, keepdims=True)
    for d in (0, 2, 5):
        # left view sees the right view's content shifted right by d
        f_l = np.empty_like(f_r)
        f_l[:, d:] = f_r[:, : w - d]
        fill = rng.normal(size=(h, d, c))
        f_l[:, :d] = fill / np.linalg.norm(fill, axis=-1, keepdims=True) if d else fill
        out = pam_forward(f_l, f_r)
        rows = np.max(np.abs(out.attn_r2l.sum(axis=-1) - 1.0))
        assert rows <= 1e-6, f"attention rows must sum to 1, off by {rows}"
        best = np.argmax(out.attn_r2l, axis=-1)
        expect = np.arange(d, w) - d
        hits = (best[:, d:] == expect[None, :]).mean()
        assert hits == 1.0, f"disparity {d}: argmax recovered {hits:.3f}"
    return "argmax recovers planar disparities 0/2/5; rows stochastic"


def _suite_scam() -> str:
    rng = Rng(40)
    f_l = rng.normal(size=(4, 12, 16))
    f_r = rng.normal(size=(4, 12, 16))
    params = ScamParams.init(16, Rng(41))
    out_l, out_r = scam_forward(f_l, f_r, params)
    assert np.array_equal(out_l, f_l) and np.array_equal(out_r, f_r), (
        "zero-gate block must be an identity"
    )
    params.gamma_l = rng.normal(size=(16,))
    params.gamma_r = rng.normal(size=(16,))
    a_l, a_r = scam_forward(f_l, f_r, params)
    b_r, b_l = scam_forward(f_r, f_l, params.swap_views())
    assert np.max(np.abs(a_l - b_l)) <= 1e-12, "view exchange must commute"
    assert np.max(np.abs(a_r - b_r)) <= 1e-12, "view exchange must commute"
    return "zero-init identity and view-exchange equivariance hold"


def _suite_pipeline_order() -> str:
    hr = StereoPair(_texture(40, 48, 50), _texture(40, 48, 51))
    cfg = DegradationConfig(track=2, scale=4, blur_sigma=1.3, blur_kernel_size=9,
                            noise_sigma=4.0, jpeg_quality=80, seed=99)
    produced = degrade_track2(hr, cfg, Rng(99))
    # independent recomposition in the published stage order
    rng = Rng(99)
    kernel = gaussian_kernel(cfg.blur_sigma, cfg.blur_kernel_size)
    lh, lw = hr.shape[0] // cfg.scale, hr.shape[1] // cfg.scale
    recomposed = []
    for view in hr.views:
        blurred = convolve2d(view, kernel)
        down = bicubic_resize(blurred, lh, lw, antialias=False)
        noisy = add_gaussian_noise(down, cfg.noise_sigma, rng)
        recomposed.append(to_float(jpeg_roundtrip(quantize8(noisy), cfg.jpeg_quality)))
    ok = np.array_equal(produced.left, recomposed[0]) and np.array_equal(
        produced.right, recomposed[1]
    )
    assert ok, "degrade_track2 does not match the blur->down->noise->jpeg composition"
    # sanity: a reordered pipeline must actually look different
    rng2 = Rng(99)
    wrong = []
    for view in hr.views:
        noisy_hr = add_gaussian_noise(view, cfg.noise_sigma, rng2)
        blurred = convolve2d(noisy_hr, kernel)
        down = bicubic_resize(blurred, lh, lw, antialias=False)
        wrong.append(to_float(jpeg_roundtrip(quantize8(down), cfg.jpeg_quality)))
    assert not np.array_equal(produced.left, wrong[0]), (
        "order swap must change the output, otherwise this check is void"
    )
    return "track-2 output equals the stage-by-stage recomposition bitwise"


def _suite_ensemble() -> str:
    rng = Rng(60)
    base = ModelParams([("w", rng.normal(size=64)), ("b", rng.normal(size=8))])
    same = ensemble_params([base, base, base], [1 / 3, 1 / 3, 1 / 3])
    assert same == base, "average of identical models must be bit-identical"
    for r in (1, 2, 3):
        f = rng.normal(size=(4, 5, 2 * r * r))
        back = pixel_unshuffle(pixel_shuffle(f, r), r)
        assert np.array_equal(back, f), f"pixel shuffle round trip broken for r={r}"
    return "identity ensembling and pixel-shuffle round trips hold"


SUITES = (
    ("blur-kernel", _suite_blur_kernel),
    ("resize", _suite_resize),
    ("metrics", _suite_metrics),
    ("loss-gradients", _suite_loss_gradients),
    ("parallax-attention", _suite_pam),
    ("cross-attention", _suite_scam),
    ("pipeline-order", _suite_pipeline_order),
    ("ensemble-shuffle", _suite_ensemble),
)


def run_selftest(print_fn=print) -> bool:
    """Run every suite; prints one line per suite, returns overall success."""
    all_ok = True
    for name, suite in SUITES:
        try:
            detail = suite()
            print_fn(f"[PASS] {name}: {detail}")
        except AssertionError as e:
            all_ok = False
            print_fn(f"[FAIL] {name}: {e}")
        except Exception as e:  # noqa: BLE001 - a crashed suite is a failure
            all_ok = False
            print_fn(f"[FAIL] {name}: {type(e).__name__}: {e}")
    return all_ok
