"""Structural similarity between baseline and adaptive outputs."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .imgcore import Image, resize, to_gray

WINDOW = 8
C1 = (0.01 * 255) ** 2
C2 = (0.03 * 255) ** 2


class DimensionMismatch(ValueError):
    pass


class TooSmall(ValueError):
    pass


class QualityMethod(str, enum.Enum):
    SSIM = "Ssim"
    FALLBACK_MAD = "FallbackMad"


@dataclass(frozen=True)
class QualityScore:
    value: float
    method: QualityMethod


def _windows(px: np.ndarray) -> np.ndarray:
    h, w = px.shape
    nh, nw = h // WINDOW, w // WINDOW
    blocks = px[: nh * WINDOW, : nw * WINDOW].astype(np.float64)
    return blocks.reshape(nh, WINDOW, nw, WINDOW).swapaxes(1, 2).reshape(nh * nw, WINDOW * WINDOW)


def ssim(a: Image, b: Image) -> float:
    """Mean SSIM over non-overlapping 8x8 windows; partial edge windows are dropped."""
    if a.size != b.size:
        raise DimensionMismatch(f"{a.size} vs {b.size}")
    if min(a.width, a.height) < WINDOW:
        raise TooSmall(f"SSIM needs at least {WINDOW}x{WINDOW}, got {a.width}x{a.height}")
    wa = _windows(np.asarray(to_gray(a).pixels))
    wb = _windows(np.asarray(to_gray(b).pixels))
    mu_a = wa.mean(axis=1)
    mu_b = wb.mean(axis=1)
    da = wa - mu_a[:, None]
    db = wb - mu_b[:, None]
    var_a = (da * da).mean(axis=1)
    var_b = (db * db).mean(axis=1)
    cov = (da * db).mean(axis=1)
    num = (2 * mu_a * mu_b + C1) * (2 * cov + C2)
    den = (mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2)
    return float(np.mean(num / den))


def quality_score(baseline_img: Image, adaptive_img: Image) -> QualityScore:
    """Compare in the baseline frame: SSIM when it fits, else 1 - MAD/255."""
    base = to_gray(baseline_img)
    adapt = resize(to_gray(adaptive_img), base.width, base.height)
    if base.width >= WINDOW and base.height >= WINDOW:
        return QualityScore(min(max(ssim(base, adapt), 0.0), 1.0), QualityMethod.SSIM)
    diff = np.abs(np.asarray(base.pixels, dtype=np.float64) - np.asarray(adapt.pixels, dtype=np.float64))
    return QualityScore(1.0 - float(diff.mean()) / 255.0, QualityMethod.FALLBACK_MAD)
