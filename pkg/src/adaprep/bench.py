"""Paired baseline-vs-adaptive evaluation harness and report writer.

Wall-clock VLM latency is not measured here. Each pipeline gets a real
preprocessing time and a proxy cost (tokens x constant) standing in for the
encoder and prefill work that scales with token count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .analyzer import ComplexityClass
from .imgcore import DecodeError, decode
from .pipeline import PipelineConfig, adaptive_preprocess, baseline_preprocess, paired_quality
from .quality import QualityMethod, QualityScore

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")

RECORD_COLUMNS = [
    "image_id",
    "source",
    "status",
    "skip_reason",
    "complexity_class",
    "complexity_score",
    "target_side",
    "baseline_tokens",
    "adaptive_tokens",
    "token_reduction",
    "baseline_proxy_cost",
    "adaptive_proxy_cost",
    "quality_value",
    "quality_method",
    "baseline_prep_ms",
    "adaptive_prep_ms",
]
TIMING_COLUMNS = ("baseline_prep_ms", "adaptive_prep_ms")

METRICS = (
    "baseline_tokens",
    "adaptive_tokens",
    "token_reduction",
    "baseline_prep_ms",
    "adaptive_prep_ms",
    "baseline_proxy_cost",
    "adaptive_proxy_cost",
    "quality_value",
)


class EmptyManifest(ValueError):
    pass


class AllSkipped(ValueError):
    pass


def build_id() -> str:
    return f"adaprep-{__version__}"


@dataclass(frozen=True)
class ManifestEntry:
    source: str
    data: bytes | None = None  # None: read from `source` on disk

    def read(self) -> bytes:
        if self.data is not None:
            return self.data
        return Path(self.source).read_bytes()


@dataclass
class PairedRecord:
    image_id: str
    source: str
    status: str = "ok"
    skip_reason: str = ""
    complexity_class: ComplexityClass | None = None
    complexity_score: float | None = None
    target_side: int | None = None
    baseline_tokens: int | None = None
    adaptive_tokens: int | None = None
    token_reduction: float | None = None
    baseline_proxy_cost: float | None = None
    adaptive_proxy_cost: float | None = None
    quality: QualityScore | None = None
    baseline_prep_ms: float | None = None
    adaptive_prep_ms: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def quality_value(self) -> float | None:
        return self.quality.value if self.quality else None

    def row(self) -> dict:
        out = {}
        for col in RECORD_COLUMNS:
            if col == "quality_value":
                value = self.quality_value
            elif col == "quality_method":
                value = self.quality.method.value if self.quality else None
            elif col == "complexity_class":
                value = self.complexity_class.value if self.complexity_class else None
            else:
                value = getattr(self, col)
            out[col] = "" if value is None else (repr(value) if isinstance(value, float) else str(value))
        return out

    @classmethod
    def from_row(cls, row: dict) -> "PairedRecord":
        def num(key, kind=float):
            return kind(row[key]) if row.get(key, "") != "" else None

        quality = None
        if row.get("quality_method"):
            quality = QualityScore(float(row["quality_value"]), QualityMethod(row["quality_method"]))
        return cls(
            image_id=row["image_id"],
            source=row["source"],
            status=row["status"],
            skip_reason=row.get("skip_reason", ""),
            complexity_class=ComplexityClass(row["complexity_class"]) if row.get("complexity_class") else None,
            complexity_score=num("complexity_score"),
            target_side=num("target_side", int),
            baseline_tokens=num("baseline_tokens", int),
            adaptive_tokens=num("adaptive_tokens", int),
            token_reduction=num("token_reduction"),
            baseline_proxy_cost=num("baseline_proxy_cost"),
            adaptive_proxy_cost=num("adaptive_proxy_cost"),
            quality=quality,
            baseline_prep_ms=num("baseline_prep_ms"),
            adaptive_prep_ms=num("adaptive_prep_ms"),
        )


@dataclass
class MetricStats:
    mean: float
    median: float
    p90: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "median": self.median, "p90": self.p90}


@dataclass
class BenchSummary:
    n: int
    n_skipped: int
    metrics: dict[str, MetricStats]
    mean_token_reduction: float
    per_class: dict[str, dict] = field(default_factory=dict)
    wall_clock_total_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "n_skipped": self.n_skipped,
            "mean_token_reduction": self.mean_token_reduction,
            "metrics": {k: v.to_dict() for k, v in self.metrics.items()},
            "per_class": self.per_class,
            "wall_clock_total_ms": self.wall_clock_total_ms,
        }


def content_id(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


def manifest_from_dir(directory) -> list[ManifestEntry]:
    """Images listed in manifest.json when present, else all PNG/JPEG files sorted by name."""
    directory = Path(directory)
    manifest = directory / "manifest.json"
    if manifest.is_file():
        doc = json.loads(manifest.read_text())
        return [ManifestEntry(str(directory / e["file"])) for e in doc["images"]]
    return [
        ManifestEntry(str(p))
        for p in sorted(directory.iterdir())
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    ]


def _median_ms(samples: list[float]) -> float:
    if len(samples) >= 3:
        samples = samples[1:]  # warm-up
    return statistics.median(samples) * 1000.0


def _timed(fn, repeats: int):
    samples = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        samples.append(time.perf_counter() - t0)
    return result, _median_ms(samples)


def measure_one(entry: ManifestEntry, cfg: PipelineConfig, repeats: int = 1, proxy_cost_per_token: float = 1.0) -> PairedRecord:
    try:
        data = entry.read()
    except OSError as exc:
        return PairedRecord(image_id="", source=entry.source, status="skipped", skip_reason=f"read error: {exc}")
    image_id = content_id(data)
    try:
        img = decode(data)
    except DecodeError as exc:
        log.warning("skipping %s: %s", entry.source, exc)
        return PairedRecord(image_id=image_id, source=entry.source, status="skipped", skip_reason=str(exc))

    (base_img, base_stats), base_ms = _timed(lambda: baseline_preprocess(img, cfg.policy), repeats)
    (adapt_img, plan), adapt_ms = _timed(lambda: adaptive_preprocess(img, cfg), repeats)
    quality = paired_quality(base_img, adapt_img, plan, cfg.policy)
    base_tokens = base_stats.token_count
    adapt_tokens = plan.predicted_tokens
    return PairedRecord(
        image_id=image_id,
        source=entry.source,
        complexity_class=plan.complexity.complexity_class,
        complexity_score=plan.complexity.score,
        target_side=plan.target_side,
        baseline_tokens=base_tokens,
        adaptive_tokens=adapt_tokens,
        token_reduction=1.0 - adapt_tokens / base_tokens,
        baseline_proxy_cost=base_tokens * proxy_cost_per_token,
        adaptive_proxy_cost=adapt_tokens * proxy_cost_per_token,
        quality=quality,
        baseline_prep_ms=base_ms,
        adaptive_prep_ms=adapt_ms,
    )


def _as_entries(manifest: Iterable) -> list[ManifestEntry]:
    entries = []
    for item in manifest:
        if isinstance(item, ManifestEntry):
            entries.append(item)
        elif isinstance(item, tuple):
            entries.append(ManifestEntry(str(item[0]), item[1]))
        else:
            entries.append(ManifestEntry(str(item)))
    return entries


def run_paired(
    manifest: Sequence,
    cfg: PipelineConfig | None = None,
    repeats: int = 1,
    *,
    workers: int = 1,
    proxy_cost_per_token: float = 1.0,
) -> list[PairedRecord]:
    """Measure baseline and adaptive preprocessing for every manifest entry.

    Entries may be paths, (name, bytes) tuples or ManifestEntry objects.
    Records come back in manifest order whatever the worker count.
    """
    cfg = cfg or PipelineConfig()
    entries = _as_entries(manifest)
    if not entries:
        raise EmptyManifest("manifest has no images")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")

    def job(entry):
        return measure_one(entry, cfg, repeats, proxy_cost_per_token)

    if workers <= 1:
        return [job(e) for e in entries]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, entries))


def lower_median(values: Sequence[float]) -> float:
    s = sorted(values)
    return s[(len(s) - 1) // 2]


def p90(values: Sequence[float]) -> float:
    """Nearest-rank 90th percentile."""
    s = sorted(values)
    return s[max(0, math.ceil(0.9 * len(s)) - 1)]


def _stats(values: list[float]) -> MetricStats:
    return MetricStats(math.fsum(values) / len(values), lower_median(values), p90(values))


def summarize(records: Sequence[PairedRecord]) -> BenchSummary:
    ok = [r for r in records if r.ok]
    if not ok:
        raise AllSkipped("no successfully measured records")
    metrics = {m: _stats([float(getattr(r, m)) for r in ok]) for m in METRICS}

    per_class = {}
    for cls in ComplexityClass:
        group = [r for r in ok if r.complexity_class is cls]
        if not group:
            continue
        per_class[cls.value] = {
            "n": len(group),
            **{m: _stats([float(getattr(r, m)) for r in group]).to_dict() for m in METRICS},
        }
    return BenchSummary(
        n=len(ok),
        n_skipped=len(records) - len(ok),
        metrics=metrics,
        mean_token_reduction=metrics["token_reduction"].mean,
        per_class=per_class,
        wall_clock_total_ms=math.fsum(r.baseline_prep_ms + r.adaptive_prep_ms for r in ok),
    )


def _write_csv(path: Path, header: list[str], rows: Iterable[Sequence]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_records(records: Sequence[PairedRecord], path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RECORD_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow(r.row())


def read_records(path) -> list[PairedRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [PairedRecord.from_row(row) for row in csv.DictReader(fh)]


def report_metadata(proxy_cost_per_token: float = 1.0) -> dict:
    return {
        "build": build_id(),
        "proxy_cost_per_token": proxy_cost_per_token,
        "proxy_cost": "visual tokens x proxy_cost_per_token; stands in for encoder and prefill "
        "latency, which is not measured (no VLM backbone is run)",
        "prep_ms": "measured preprocessing wall time only (monotonic clock, median of repeats, "
        "first run discarded when repeats >= 3); excludes any model inference",
    }


def emit_report(summary: BenchSummary, records: Sequence[PairedRecord], path, *, proxy_cost_per_token: float = 1.0) -> list[Path]:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    ok = [r for r in records if r.ok]
    written = []

    target = out / "records.csv"
    write_records(records, target)
    written.append(target)

    target = out / "summary.json"
    doc = {"schema_version": SCHEMA_VERSION, "metadata": report_metadata(proxy_cost_per_token), "summary": summary.to_dict()}
    target.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    written.append(target)

    figures = {
        "fig5_times.csv": (
            ["image_id", "baseline_prep_ms", "adaptive_prep_ms", "baseline_proxy_cost", "adaptive_proxy_cost"],
            [[r.image_id, repr(r.baseline_prep_ms), repr(r.adaptive_prep_ms), repr(r.baseline_proxy_cost), repr(r.adaptive_proxy_cost)] for r in ok],
        ),
        "fig6_means.csv": (
            ["pipeline", "mean_prep_ms", "mean_proxy_cost"],
            [
                ["baseline", repr(summary.metrics["baseline_prep_ms"].mean), repr(summary.metrics["baseline_proxy_cost"].mean)],
                ["adaptive", repr(summary.metrics["adaptive_prep_ms"].mean), repr(summary.metrics["adaptive_proxy_cost"].mean)],
            ],
        ),
        "fig7_reduction.csv": (
            ["image_id", "complexity_class", "baseline_tokens", "adaptive_tokens", "token_reduction"],
            [[r.image_id, r.complexity_class.value, r.baseline_tokens, r.adaptive_tokens, repr(r.token_reduction)] for r in ok],
        ),
        "fig8_tokens_vs_quality.csv": (
            ["image_id", "adaptive_tokens", "quality_value", "method"],
            [[r.image_id, r.adaptive_tokens, repr(r.quality.value), r.quality.method.value] for r in ok],
        ),
        "fig9_quality.csv": (
            ["image_id", "complexity_class", "quality_value", "method"],
            [[r.image_id, r.complexity_class.value, repr(r.quality.value), r.quality.method.value] for r in ok],
        ),
    }
    for name, (header, rows) in figures.items():
        target = out / name
        _write_csv(target, header, rows)
        written.append(target)
    return written
