#!/usr/bin/env python3
"""End-to-end demo of the benchmark loop on a synthetic dataset.

Builds a few procedural HR stereo scenes, produces both degradation tracks
through the CLI, scores two trivial restoration baselines (bicubic and
nearest-neighbour upsampling) against the HR ground truth, ranks them, and
checks an example architecture against the compute budget.

Usage:
    python3 scripts/run_benchmark_demo.py [--out DIR] [--scenes N]
"""

import argparse
import json
from pathlib import Path

import numpy as np

from stereobench.budget import format_verdict, load_graph, check_budget
from stereobench.cli import main as cli
from stereobench.images import (
    HR_DIRNAME,
    list_scenes,
    load_stereo_pair,
    quantize8,
    save_image,
    view_filename,
)
from stereobench.metrics import rank_leaderboard, report_to_markdown, score_submission
from stereobench.resize import bicubic_resize

SCALE = 4

EXAMPLE_GRAPH = {
    "input": {"height": 180, "width": 320, "views": 2, "channels": 3},
    "layers": [
        {"op": "conv2d", "in_ch": 3, "out_ch": 48, "k": 3},
        {
            "op": "repeat",
            "count": 12,
            "layers": [
                {"op": "norm", "channels": 48},
                {"op": "conv2d", "in_ch": 48, "out_ch": 48, "k": 3},
                {"op": "row_attention", "channels": 48},
            ],
        },
        {"op": "conv2d", "in_ch": 48, "out_ch": 48 * SCALE * SCALE, "k": 3},
        {"op": "pixel_shuffle", "r": SCALE},
        {"op": "conv2d", "in_ch": 48, "out_ch": 3, "k": 3},
    ],
}


def make_scene(h: int, w: int, seed: int, disparity: int = 8):
    """Smooth banded scene with texture; left/right views share content."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0 : w + disparity].astype(np.float64)
    wide = np.empty((h, w + disparity, 3))
    for c in range(3):
        fx, fy = rng.uniform(1.0, 3.5, 2)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        wide[:, :, c] = 0.5 + 0.22 * np.sin(2 * np.pi * fx * xx / w + phase) * np.cos(
            2 * np.pi * fy * yy / h + phase / 2
        )
    wide += rng.normal(0.0, 0.04, wide.shape)
    wide = np.clip(wide, 0.0, 1.0)
    return wide[:, disparity:], wide[:, : w + 0]


def build_dataset(root: Path, n_scenes: int, h: int, w: int) -> Path:
    hr_dir = root / HR_DIRNAME
    hr_dir.mkdir(parents=True, exist_ok=True)
    for i in range(n_scenes):
        left, right = make_scene(h, w, seed=1000 + i)
        save_image(quantize8(left), hr_dir / view_filename(f"{i:04d}", "L"))
        save_image(quantize8(right), hr_dir / view_filename(f"{i:04d}", "R"))
    return hr_dir


def upsample_submission(lr_dir: Path, out_dir: Path, method: str, scale: int = SCALE) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for stem in list_scenes(lr_dir):
        pair = load_stereo_pair(lr_dir, stem)
        for view, img in zip(("L", "R"), pair.views):
            h, w = img.shape[0] * scale, img.shape[1] * scale
            if method == "bicubic":
                up = bicubic_resize(img, h, w)
            else:  # nearest neighbour: repeat each LR sample scale x scale times
                up = np.repeat(np.repeat(img, scale, axis=0), scale, axis=1)
            save_image(quantize8(up), out_dir / view_filename(stem, view))


def run(out_root: Path, n_scenes: int) -> None:
    h, w = 128, 192
    hr_dir = build_dataset(out_root, n_scenes, h, w)
    print(f"dataset: {n_scenes} scenes at {h}x{w} in {hr_dir}")

    for track in (1, 2):
        lr_dir = out_root / f"lr_track{track}"
        cli(["degrade", "--track", str(track), "--hr", str(hr_dir), "--out", str(lr_dir)])

    entries = []
    for method in ("bicubic", "nearest"):
        for track in (1, 2):
            sub_dir = out_root / "submissions" / f"{method}_track{track}"
            upsample_submission(out_root / f"lr_track{track}", sub_dir, method)
            report = score_submission(hr_dir, sub_dir)
            entries.append((f"{method}_track{track}", report.mean_psnr_db))
            print(
                f"{method:8s} track {track}: "
                f"PSNR {report.mean_psnr_db:7.4f} dB, SSIM {report.mean_ssim:.4f}"
            )
            (sub_dir / "report.md").write_text(report_to_markdown(report))

    print("\nleaderboard (aggregate PSNR):")
    for e in rank_leaderboard(entries):
        print(f"  {e.rank}. {e.team:18s} {e.psnr_db:.4f} dB")

    graph_path = out_root / "example_graph.json"
    graph_path.write_text(json.dumps(EXAMPLE_GRAPH, indent=2))
    verdict = check_budget(load_graph(graph_path))
    print("\nbudget check of the example architecture:")
    print(format_verdict(verdict))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/demo"), help="work directory")
    ap.add_argument("--scenes", type=int, default=4, help="number of synthetic scenes")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    run(args.out, args.scenes)


if __name__ == "__main__":
    main()
