"""Command line interface.

    stereobench degrade  --track {1,2} --hr DIR --out DIR [...]
    stereobench score    --gt DIR --sr DIR [--format {csv,md}] [--out FILE]
    stereobench budget   --graph FILE.json
    stereobench selftest

Exit codes: 0 success, 1 domain error (bad image, over budget, failed
suite), 2 usage error (argparse).  Degradation runs write a manifest.json
next to the outputs recording the resolved configuration and the sha256 of
every PNG written; given identical inputs, config and seed the checksums
are identical across runs (timings of course are not).

Configuration precedence for degrade: command line flags beat the JSON
config file, which beats the built-in defaults.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .budget import check_budget, format_verdict, load_graph
from .degrade import FAULT_ENV_VAR, DegradationConfig, degrade_pair
from .errors import MissingScene, StereoBenchError
from .images import crop_to_multiple, list_scenes, load_stereo_pair, save_stereo_pair
from .metrics import report_to_csv, report_to_markdown, score_submission
from .rng import Rng
from .selftest import run_selftest


@dataclass
class RunManifest:
    version: str
    command: str
    config: dict
    scenes: dict = field(default_factory=dict)   # stem -> {"L": sha256, "R": sha256}
    timings: dict = field(default_factory=dict)  # seconds

    def save(self, path: Path) -> None:
        with open(path, "w") as f:
            json.dump(asdict(self), f, indent=2, sort_keys=True)
            f.write("\n")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _scene_key(stem: str) -> int:
    """Stable 64-bit stream key for a scene name."""
    digest = hashlib.sha256(stem.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def _degrade_one(stem: str, hr_dir: Path, out_dir: Path, cfg: DegradationConfig):
    t0 = time.perf_counter()
    pair = load_stereo_pair(hr_dir, stem)
    pair = pair.map(lambda v: crop_to_multiple(v, cfg.scale))
    rng = Rng(cfg.seed).derive(_scene_key(stem))
    lr = degrade_pair(pair, cfg, rng)
    paths = save_stereo_pair(lr, out_dir, stem)
    checks = {p.stem[-1]: _sha256(p) for p in paths}
    return stem, checks, time.perf_counter() - t0


def cmd_degrade(args) -> int:
    file_cfg = DegradationConfig.load(args.config) if args.config else DegradationConfig()
    cfg = file_cfg.override(track=args.track, scale=args.scale, seed=args.seed)
    hr_dir = Path(args.hr)
    out_dir = Path(args.out)
    stems = list_scenes(hr_dir)
    if not stems:
        raise MissingScene(f"no scenes (*_L.png) found under {hr_dir}")
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest = RunManifest(version=__version__, command="degrade", config=cfg.to_json())
    t0 = time.perf_counter()
    failures: list[tuple[str, str]] = []

    def run(stem: str):
        try:
            return _degrade_one(stem, hr_dir, out_dir, cfg)
        except (StereoBenchError, OSError) as e:
            failures.append((stem, str(e)))
            return None

    if args.threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(run, stems))
    else:
        results = [run(stem) for stem in stems]

    per_scene = {}
    for res in results:
        if res is None:
            continue
        stem, checks, dt = res
        manifest.scenes[stem] = checks
        per_scene[stem] = round(dt, 6)
    manifest.timings = {
        "total_seconds": round(time.perf_counter() - t0, 6),
        "per_scene_seconds": per_scene,
    }
    manifest.save(out_dir / "manifest.json")

    print(f"degraded {len(manifest.scenes)}/{len(stems)} scenes "
          f"(track {cfg.track}, x{cfg.scale}, seed {cfg.seed}) -> {out_dir}")
    if failures:
        for stem, msg in failures:
            print(f"error: scene {stem}: {msg}", file=sys.stderr)
        return 1
    return 0


def cmd_score(args) -> int:
    report = score_submission(args.gt, args.sr)
    psnr = "inf" if report.mean_psnr_db == float("inf") else f"{report.mean_psnr_db:.4f}"
    print(f"PSNR: {psnr}, SSIM: {report.mean_ssim:.4f}")
    print(f"scenes: {report.scene_count}, images: {report.image_count}, "
          f"dimensions: {report.dimensions}")
    if args.out:
        text = report_to_csv(report) if args.format == "csv" else report_to_markdown(report)
        Path(args.out).write_text(text)
        print(f"wrote {args.format} report to {args.out}")
    return 0


def cmd_budget(args) -> int:
    graph = load_graph(args.graph)
    verdict = check_budget(graph)
    print(format_verdict(verdict))
    return 0 if verdict.ok else 1


def cmd_selftest(args) -> int:
    if args.inject_fault:
        import os

        os.environ[FAULT_ENV_VAR] = args.inject_fault
    ok = run_selftest()
    print("selftest:", "OK" if ok else "FAILED")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stereobench",
        description="Stereo super-resolution benchmark toolkit",
    )
    parser.add_argument("--version", action="version", version=f"stereobench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrade", help="synthesise LR pairs from HR pairs")
    p.add_argument("--track", type=int, choices=(1, 2), help="degradation track")
    p.add_argument("--scale", type=int, help="downscaling factor (default 4)")
    p.add_argument("--hr", required=True, help="directory with <scene>_{L,R}.png HR pairs")
    p.add_argument("--out", required=True, help="output directory for LR pairs + manifest")
    p.add_argument("--config", help="JSON degradation config file")
    p.add_argument("--seed", type=int, help="override the run seed")
    p.add_argument("--threads", type=int, default=1, help="parallel scene workers")
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("score", help="score a submission against ground truth")
    p.add_argument("--gt", required=True, help="ground-truth HR directory")
    p.add_argument("--sr", required=True, help="submission directory")
    p.add_argument("--format", choices=("csv", "md"), default="csv", help="report format")
    p.add_argument("--out", help="write per-image report to this file")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("budget", help="check a model graph against the limits")
    p.add_argument("--graph", required=True, help="JSON graph description")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("selftest", help="run the built-in verification suites")
    p.add_argument("--inject-fault", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StereoBenchError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
