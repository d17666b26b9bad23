"""Fidelity metrics, submission scoring and leaderboard ranking.

PSNR is computed on RGB directly: one MSE over all H*W*3 samples at 8-bit
scale, no colour conversion and no border crop,

    psnr = 10 log10(255^2 / mse),   +inf when the images are identical.

SSIM follows the standard single-scale form: 11x11 Gaussian window with
sigma 1.5, K1 = 0.01, K2 = 0.03, L = 255, computed per channel over every
pixel (symmetric boundary padding, no crop) and averaged across channels.

Ranking uses competition ties: teams with equal aggregate PSNR share the
smallest rank of the group and the following rank is skipped (1224).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from .errors import DimensionMismatch, MissingScene, MissingView, TooSmall
from .images import list_scenes, load_image, validate_image8, view_filename

SSIM_WINDOW_SIZE = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
DYNAMIC_RANGE = 255.0


def _check_same_shape(gt8: np.ndarray, sr8: np.ndarray) -> None:
    if gt8.shape != sr8.shape:
        raise DimensionMismatch(f"shape mismatch: {gt8.shape} vs {sr8.shape}")


def psnr_rgb(gt8: np.ndarray, sr8: np.ndarray) -> float:
    """Peak signal-to-noise ratio over all RGB samples, in dB."""
    validate_image8(gt8)
    validate_image8(sr8)
    _check_same_shape(gt8, sr8)
    diff = gt8.astype(np.float64) - sr8.astype(np.float64)
    mse = np.mean(diff * diff)
    if mse == 0.0:
        return float("inf")
    return float(10.0 * np.log10(DYNAMIC_RANGE * DYNAMIC_RANGE / mse))


def _gaussian_window_1d() -> np.ndarray:
    half = SSIM_WINDOW_SIZE // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * SSIM_SIGMA * SSIM_SIGMA))
    return g / g.sum()


_SSIM_WIN_1D = _gaussian_window_1d()


def _windowed_mean(x: np.ndarray) -> np.ndarray:
    # separable Gaussian window, applied to every channel; BORDER_REFLECT
    # is symmetric padding (edge sample repeated)
    return cv2.sepFilter2D(x, -1, _SSIM_WIN_1D, _SSIM_WIN_1D, borderType=cv2.BORDER_REFLECT)


def ssim(gt8: np.ndarray, sr8: np.ndarray) -> float:
    """Mean structural similarity over all pixels, averaged across channels."""
    validate_image8(gt8)
    validate_image8(sr8)
    _check_same_shape(gt8, sr8)
    h, w = gt8.shape[:2]
    if h < SSIM_WINDOW_SIZE or w < SSIM_WINDOW_SIZE:
        raise TooSmall(f"image {h}x{w} smaller than the {SSIM_WINDOW_SIZE}x{SSIM_WINDOW_SIZE} window")
    c1 = (SSIM_K1 * DYNAMIC_RANGE) ** 2
    c2 = (SSIM_K2 * DYNAMIC_RANGE) ** 2
    x = gt8.astype(np.float64)
    y = sr8.astype(np.float64)
    mu_x = _windowed_mean(x)
    mu_y = _windowed_mean(y)
    e_xx = _windowed_mean(x * x)
    e_yy = _windowed_mean(y * y)
    e_xy = _windowed_mean(x * y)
    # scoring full-size submissions is throughput-bound, so the map is
    # assembled in place on whole 3-channel arrays
    mu_xy = mu_x * mu_y
    e_xy -= mu_xy                             # covariance
    np.multiply(mu_x, mu_x, out=mu_x)
    np.multiply(mu_y, mu_y, out=mu_y)
    e_xx += e_yy
    e_xx -= mu_x
    e_xx -= mu_y                              # var_x + var_y
    mu_xy *= 2.0
    mu_xy += c1                               # 2 mu_x mu_y + c1
    mu_x += mu_y
    mu_x += c1                                # mu_x^2 + mu_y^2 + c1
    e_xy *= 2.0
    e_xy += c2                                # 2 cov + c2
    e_xx += c2                                # var_x + var_y + c2
    mu_xy *= e_xy
    mu_x *= e_xx
    mu_xy /= mu_x                             # per-pixel ssim map
    return float(np.mean([float(mu_xy[:, :, ch].mean()) for ch in range(3)]))


@dataclass(frozen=True)
class ImageScore:
    scene: str
    view: str
    psnr_db: float
    ssim: float


@dataclass
class ScoreReport:
    scores: list[ImageScore]
    mean_psnr_db: float
    mean_ssim: float
    scene_count: int
    image_count: int
    dimensions: dict[str, int] = field(default_factory=dict)  # "HxW" -> images

    @classmethod
    def from_scores(cls, scores: list[ImageScore], dims: list[tuple[int, int]]) -> "ScoreReport":
        if not scores:
            raise MissingScene("no scenes scored")
        psnrs = [s.psnr_db for s in scores]
        ssims = [s.ssim for s in scores]
        dim_counts: dict[str, int] = {}
        for h, w in dims:
            key = f"{h}x{w}"
            dim_counts[key] = dim_counts.get(key, 0) + 1
        return cls(
            scores=scores,
            mean_psnr_db=float(np.mean(psnrs)),
            mean_ssim=float(np.mean(ssims)),
            scene_count=len({s.scene for s in scores}),
            image_count=len(scores),
            dimensions=dim_counts,
        )


def score_submission(gt_dir: str | Path, sr_dir: str | Path) -> ScoreReport:
    """Score every scene of a submission against the ground truth.

    Scenes are enumerated from the GT directory; a submission missing both
    views of a scene raises MissingScene, missing one view raises
    MissingView naming the offending file stem.
    """
    gt_dir, sr_dir = Path(gt_dir), Path(sr_dir)
    stems = list_scenes(gt_dir)
    if not stems:
        raise MissingScene(f"no scenes found under {gt_dir}")
    scores: list[ImageScore] = []
    dims: list[tuple[int, int]] = []
    for stem in stems:
        present = {v: (sr_dir / view_filename(stem, v)).is_file() for v in ("L", "R")}
        if not any(present.values()):
            raise MissingScene(f"submission missing scene {stem}")
        if not all(present.values()):
            missing = next(v for v, ok in present.items() if not ok)
            raise MissingView(f"submission missing view {stem}_{missing}")
        for view in ("L", "R"):
            gt = load_image(gt_dir / view_filename(stem, view))
            sr = load_image(sr_dir / view_filename(stem, view))
            if gt.shape != sr.shape:
                raise DimensionMismatch(
                    f"scene {stem}_{view}: GT {gt.shape[:2]} vs submission {sr.shape[:2]}"
                )
            scores.append(ImageScore(stem, view, psnr_rgb(gt, sr), ssim(gt, sr)))
            dims.append(gt.shape[:2])
    return ScoreReport.from_scores(scores, dims)


@dataclass(frozen=True)
class LeaderboardEntry:
    rank: int
    team: str
    psnr_db: float


def rank_leaderboard(aggregates) -> list[LeaderboardEntry]:
    """Order (team, psnr) entries by PSNR descending with competition ties."""
    items = list(aggregates.items()) if hasattr(aggregates, "items") else list(aggregates)
    if not items:
        raise MissingScene("leaderboard needs at least one entry")
    items.sort(key=lambda kv: -kv[1])
    out: list[LeaderboardEntry] = []
    for i, (team, value) in enumerate(items):
        rank = out[-1].rank if out and out[-1].psnr_db == value else i + 1
        out.append(LeaderboardEntry(rank=rank, team=team, psnr_db=float(value)))
    return out


def _fmt(v: float, places: int) -> str:
    return "inf" if np.isinf(v) else f"{v:.{places}f}"


def report_to_csv(report: ScoreReport) -> str:
    buf = io.StringIO()
    buf.write("scene,view,psnr_db,ssim\n")
    for s in report.scores:
        buf.write(f"{s.scene},{s.view},{_fmt(s.psnr_db, 6)},{_fmt(s.ssim, 6)}\n")
    buf.write(f"mean,all,{_fmt(report.mean_psnr_db, 6)},{_fmt(report.mean_ssim, 6)}\n")
    return buf.getvalue()


def report_to_markdown(report: ScoreReport) -> str:
    lines = [
        "| scene | view | PSNR (RGB) | SSIM |",
        "| --- | --- | --- | --- |",
    ]
    for s in report.scores:
        lines.append(f"| {s.scene} | {s.view} | {_fmt(s.psnr_db, 4)} | {_fmt(s.ssim, 4)} |")
    lines.append(f"| **mean** | all | {_fmt(report.mean_psnr_db, 4)} | {_fmt(report.mean_ssim, 4)} |")
    return "\n".join(lines) + "\n"
