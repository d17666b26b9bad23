"""stereobench: benchmark toolkit for constrained stereo super-resolution.

Synthesises the two degradation tracks, scores submissions with the
challenge metrics and aggregation, enforces the parameter/MAC budgets, and
ships reference numerics (parallax and cross attention, losses with
analytic gradients, parameter ensembling, stereo-safe augmentation).
"""

__version__ = "0.1.0"

from .attention import (
    PamOutput,
    ScamParams,
    pam_forward,
    pixel_shuffle,
    pixel_unshuffle,
    scam_forward,
)
from .augment import SUPPORTED_OPS, augment, beta_sample
from .budget import (
    MACS_LIMIT,
    PARAM_LIMIT,
    BudgetVerdict,
    GraphDescriptor,
    InputSpec,
    check_budget,
    count_macs,
    count_params,
    format_verdict,
    load_graph,
    parse_graph,
    verdict_from_totals,
)
from .degrade import (
    DegradationConfig,
    add_gaussian_noise,
    convolve2d,
    degrade_pair,
    degrade_track1,
    degrade_track2,
    gaussian_kernel,
)
from .ensemble import ModelParams, ensemble_params, load_params, save_params
from .errors import StereoBenchError
from .images import (
    SceneId,
    StereoPair,
    crop_to_multiple,
    list_scenes,
    load_image,
    load_stereo_pair,
    quantize8,
    save_image,
    save_stereo_pair,
    to_float,
)
from .jpeg import jpeg_roundtrip
from .losses import (
    LossConfig,
    bp_loss,
    charbonnier_loss,
    fft_loss,
    l1_loss,
    total_loss,
)
from .metrics import (
    ImageScore,
    LeaderboardEntry,
    ScoreReport,
    psnr_rgb,
    rank_leaderboard,
    report_to_csv,
    report_to_markdown,
    score_submission,
    ssim,
)
from .resize import bicubic_resize, resize_adjoint, resize_weights
from .rng import DEFAULT_SEED, Rng
from .selftest import run_selftest
