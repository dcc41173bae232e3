"""YAML config file -> PipelineConfig + bench settings.

Every key is optional. Unknown keys are rejected so typos fail loudly.

    analyzer: {grad_threshold: 32, t_low: 0.25, t_high: 0.6, ...}
    policy:   {low_side: 512, medium_side: 768, high_side: 1024, patch: 64}
    crop:     {enabled: true, margin_frac: 0.02, ...}
    bench:    {repeats: 5, workers: 1, out_dir: report, proxy_cost_per_token: 1.0}
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import yaml

from .analyzer import AnalyzerConfig
from .cropper import CropConfig
from .pipeline import PipelineConfig
from .policy import ResolutionPolicy


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BenchSettings:
    repeats: int = 5
    workers: int = 1
    out_dir: str = "report"
    proxy_cost_per_token: float = 1.0


SECTIONS = {
    "analyzer": AnalyzerConfig,
    "policy": ResolutionPolicy,
    "crop": CropConfig,
    "bench": BenchSettings,
}


def _build(cls, section: str, values) -> object:
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ConfigError(f"section '{section}' must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    for key in values:
        if key not in known:
            raise ConfigError(f"unknown config key '{section}.{key}'")
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{section}' section: {exc}") from exc


def parse_config(doc: dict | None) -> tuple[PipelineConfig, BenchSettings]:
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    for key in doc:
        if key not in SECTIONS:
            raise ConfigError(f"unknown config key '{key}'")
    parts = {name: _build(cls, name, doc.get(name)) for name, cls in SECTIONS.items()}
    pipeline = PipelineConfig(analyzer=parts["analyzer"], policy=parts["policy"], crop=parts["crop"])
    return pipeline, parts["bench"]


def load_config(path=None) -> tuple[PipelineConfig, BenchSettings]:
    if path is None:
        return parse_config({})
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return parse_config(doc)
