"""adaprep command line: analyze, preprocess, gen-corpus, bench."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from .analyzer import analyze
from .bench import (
    EmptyManifest,
    ManifestEntry,
    build_id,
    content_id,
    emit_report,
    manifest_from_dir,
    run_paired,
    summarize,
)
from .config import BenchSettings, ConfigError, load_config
from .corpus import CorpusSpec, generate, write_corpus
from .imgcore import DecodeError, decode, write_png
from .pipeline import PipelineConfig, adaptive_preprocess, baseline_preprocess
from .policy import ResolutionPolicy

log = logging.getLogger("adaprep")

OUT_ENV = "ADAPREP_OUT"


def _pair(text: str, sep: str, n: int, name: str) -> list[int]:
    try:
        parts = [int(p) for p in text.split(sep)]
    except ValueError:
        parts = []
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"{name} expects {n} integers separated by '{sep}', got {text!r}")
    return parts


def _inputs(path) -> list[ManifestEntry]:
    path = Path(path)
    if path.is_dir():
        return manifest_from_dir(path)
    return [ManifestEntry(str(path))]


def _resolve(args) -> tuple[PipelineConfig, BenchSettings]:
    """Config file, then env, then flags (flags win)."""
    cfg, bench = load_config(getattr(args, "config", None))
    policy = cfg.policy
    if getattr(args, "tiers", None) or getattr(args, "patch", None):
        low, med, high = args.tiers or (policy.low_side, policy.medium_side, policy.high_side)
        baseline = policy.baseline_side if policy.baseline_side != policy.high_side else None
        try:
            policy = ResolutionPolicy(low, med, high, baseline, args.patch or policy.patch)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    crop = cfg.crop
    if getattr(args, "no_crop", False):
        crop = dataclasses.replace(crop, enabled=False)
    cfg = PipelineConfig(analyzer=cfg.analyzer, policy=policy, crop=crop)

    updates = {}
    if os.environ.get(OUT_ENV):
        updates["out_dir"] = os.environ[OUT_ENV]
    if getattr(args, "out", None):
        updates["out_dir"] = args.out
    if getattr(args, "workers", None):
        updates["workers"] = args.workers
    if getattr(args, "repeats", None):
        updates["repeats"] = args.repeats
    return cfg, dataclasses.replace(bench, **updates)


def cmd_analyze(args) -> int:
    cfg, _ = _resolve(args)
    n = 0
    for entry in _inputs(args.input):
        try:
            data = entry.read()
            img = decode(data)
        except (OSError, DecodeError) as exc:
            log.warning("skipping %s: %s", entry.source, exc)
            continue
        report = analyze(img, cfg.analyzer)
        line = {"source": entry.source, "image_id": content_id(data), **report.to_dict()}
        print(json.dumps(line))
        n += 1
    if n == 0:
        log.error("no readable images under %s", args.input)
        return 1
    return 0


def cmd_preprocess(args) -> int:
    cfg, bench = _resolve(args)
    out = Path(bench.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = 0
    for entry in _inputs(args.input):
        try:
            data = entry.read()
            img = decode(data)
        except (OSError, DecodeError) as exc:
            log.warning("skipping %s: %s", entry.source, exc)
            continue
        stem = Path(entry.source).stem
        base_img, base_stats = baseline_preprocess(img, cfg.policy)
        if args.mode == "baseline":
            result = base_img
            record = {
                "mode": "baseline",
                "output_dims": [base_img.width, base_img.height],
                "predicted_tokens": base_stats.token_count,
            }
        else:
            result, plan = adaptive_preprocess(img, cfg)
            record = {
                "mode": "adaptive",
                **plan.to_dict(),
                "baseline_tokens": base_stats.token_count,
                "token_reduction": 1.0 - plan.predicted_tokens / base_stats.token_count,
            }
        record.update({"source": entry.source, "image_id": content_id(data), "build": build_id()})
        write_png(result, out / f"{stem}.png")
        (out / f"{stem}.plan.json").write_text(json.dumps(record, indent=2) + "\n")
        n += 1
    if n == 0:
        log.error("no readable images under %s", args.input)
        return 1
    return 0


def cmd_gen_corpus(args) -> int:
    low, med, high = args.counts
    w, h = args.dims
    spec = CorpusSpec(seed=args.seed, count_low=low, count_medium=med, count_high=high, page_w=w, page_h=h)
    out = args.out or os.environ.get(OUT_ENV) or "corpus"
    path = write_corpus(generate(spec), out, spec)
    print(f"wrote {spec.total} pages and {path}")
    return 0


def cmd_bench(args) -> int:
    cfg, bench = _resolve(args)
    records = run_paired(
        _inputs(args.input),
        cfg,
        bench.repeats,
        workers=bench.workers,
        proxy_cost_per_token=bench.proxy_cost_per_token,
    )
    summary = summarize(records)
    emit_report(summary, records, bench.out_dir, proxy_cost_per_token=bench.proxy_cost_per_token)
    line = {
        "n": summary.n,
        "n_skipped": summary.n_skipped,
        "mean_token_reduction": summary.mean_token_reduction,
        "mean_baseline_prep_ms": summary.metrics["baseline_prep_ms"].mean,
        "mean_adaptive_prep_ms": summary.metrics["adaptive_prep_ms"].mean,
        "mean_quality": summary.metrics["quality_value"].mean,
        "report": str(bench.out_dir),
    }
    print(json.dumps(line))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaprep", description="Adaptive visual preprocessing for VLM inputs.")
    parser.add_argument("--version", action="version", version=build_id())
    parser.add_argument("-v", "--verbose", action="store_true")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file")
    common.add_argument("--out", help=f"output directory (env {OUT_ENV})")
    common.add_argument("--no-crop", action="store_true", help="disable content-aware cropping")
    common.add_argument("--patch", type=int, help="pixels per visual-token patch side")
    common.add_argument(
        "--tiers", type=lambda s: _pair(s, ",", 3, "--tiers"), help="long-side tiers L,M,H, e.g. 512,768,1024"
    )
    common.add_argument("--workers", type=int)
    common.add_argument("--repeats", type=int)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="print complexity signals as JSON lines")
    p.add_argument("input", help="image file or directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("preprocess", parents=[common], help="write preprocessed PNG + plan JSON per image")
    p.add_argument("input")
    p.add_argument("--mode", choices=["baseline", "adaptive"], default="adaptive")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("gen-corpus", help="generate the synthetic document corpus")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--counts", type=lambda s: _pair(s, ",", 3, "--counts"), default=[12, 10, 10], help="L,M,H")
    p.add_argument("--dims", type=lambda s: _pair(s.lower(), "x", 2, "--dims"), default=[1700, 2200], help="WxH")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("bench", parents=[common], help="paired baseline vs adaptive benchmark")
    p.add_argument("input", help="image directory (manifest.json honoured)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, EmptyManifest) as exc:
        print(f"adaprep: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"adaprep: IoError: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
