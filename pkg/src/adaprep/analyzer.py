"""Content-aware complexity analysis: edge density, intensity entropy and a
row-transition text proxy fused into a single score in [0, 1]."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .imgcore import (
    GradientMap,
    Image,
    energy_cutoff,
    fit_long_side,
    gradient_energy,
    histogram256,
    resize,
    to_gray,
)


class EmptyHistogram(ValueError):
    pass


class ComplexityClass(str, enum.Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


@dataclass(frozen=True)
class AnalyzerConfig:
    grad_threshold: int = 32
    weight_edge: float = 0.45
    weight_entropy: float = 0.45
    weight_text: float = 0.10
    edge_density_ref: float = 0.20
    analysis_side: int = 512
    t_low: float = 0.25
    t_high: float = 0.60

    def __post_init__(self):
        if not 1 <= self.grad_threshold <= 255:
            raise ValueError("grad_threshold must be in [1, 255]")
        weights = (self.weight_edge, self.weight_entropy, self.weight_text)
        if min(weights) < 0 or sum(weights) <= 0:
            raise ValueError("weights must be non-negative with a positive sum")
        total = sum(weights)
        object.__setattr__(self, "weight_edge", self.weight_edge / total)
        object.__setattr__(self, "weight_entropy", self.weight_entropy / total)
        object.__setattr__(self, "weight_text", self.weight_text / total)
        if not 0 < self.edge_density_ref <= 1:
            raise ValueError("edge_density_ref must be in (0, 1]")
        if self.analysis_side < 1:
            raise ValueError("analysis_side must be >= 1")
        if not 0 < self.t_low < self.t_high < 1:
            raise ValueError("thresholds must satisfy 0 < t_low < t_high < 1")


@dataclass(frozen=True)
class ComplexityReport:
    edge_density: float
    entropy_bits: float
    text_density: float
    score: float
    complexity_class: ComplexityClass

    def to_dict(self) -> dict:
        return {
            "edge_density": self.edge_density,
            "entropy_bits": self.entropy_bits,
            "text_density": self.text_density,
            "score": self.score,
            "class": self.complexity_class.value,
        }


def edge_density(gm: GradientMap, grad_threshold: int) -> float:
    mags = gm.magnitudes
    return int(np.count_nonzero(mags >= grad_threshold)) / mags.size


def entropy_bits(hist) -> float:
    """Shannon entropy (bits) of a 256-bin histogram."""
    counts = np.asarray(hist, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise EmptyHistogram("histogram has no samples")
    p = counts[counts > 0] / total
    h = float(-(p * np.log2(p)).sum())
    return min(max(h, 0.0), 8.0)


def otsu_threshold(hist) -> int:
    """Otsu threshold t: pixels <= t form the dark class."""
    counts = np.asarray(hist, dtype=np.float64)
    total = counts.sum()
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(counts)
    m0 = np.cumsum(counts * levels)
    w1 = total - w0
    mean_all = m0[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        between = (mean_all * w0 - m0 * total) ** 2 / (w0 * w1)
    between[~np.isfinite(between)] = -1.0
    return int(np.argmax(between))


def row_transitions(binary: np.ndarray) -> np.ndarray:
    """Per-row count of dark<->light changes along x."""
    return np.count_nonzero(binary[:, 1:] != binary[:, :-1], axis=1)


def text_density(gray: Image) -> float:
    """Fraction of rows whose Otsu-binarized profile flips often enough to look like text."""
    px = np.asarray(gray.pixels)
    h, w = px.shape
    t = otsu_threshold(histogram256(gray))
    flips = row_transitions(px > t)
    floor = max(4.0, w / 50.0)
    return int(np.count_nonzero(flips >= floor)) / h


def classify(score: float, t_low: float, t_high: float) -> ComplexityClass:
    if score < t_low:
        return ComplexityClass.LOW
    if score > t_high:
        return ComplexityClass.HIGH
    return ComplexityClass.MEDIUM


def analysis_copy(img: Image, side: int) -> Image:
    """Gray copy whose long side is at most `side` (never upscaled)."""
    if max(img.width, img.height) > side:
        img = resize(img, *fit_long_side(img.width, img.height, side))
    return to_gray(img)


def fuse(edge: float, entropy: float, text: float, cfg: AnalyzerConfig) -> float:
    score = (
        cfg.weight_edge * min(edge / cfg.edge_density_ref, 1.0)
        + cfg.weight_entropy * (entropy / 8.0)
        + cfg.weight_text * text
    )
    return min(max(score, 0.0), 1.0)


def analyze(img: Image, cfg: AnalyzerConfig | None = None) -> ComplexityReport:
    cfg = cfg or AnalyzerConfig()
    gray = analysis_copy(img, cfg.analysis_side)
    energy = gradient_energy(gray)
    edge = int(np.count_nonzero(energy >= energy_cutoff(cfg.grad_threshold))) / energy.size
    entropy = entropy_bits(histogram256(gray))
    text = text_density(gray) if gray.width >= 2 else 0.0
    score = fuse(edge, entropy, text, cfg)
    return ComplexityReport(edge, entropy, text, score, classify(score, cfg.t_low, cfg.t_high))
