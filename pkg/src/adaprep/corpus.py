"""Seeded synthetic document pages with known complexity classes.

Text is emulated by stripe blocks: 4-px dark rows alternating with 4-px light
rows, each dark row broken into word-length dashes. No fonts are needed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analyzer import ComplexityClass
from .imgcore import Image, encode_png

STRIPE = 4
WHITE = 255


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 42
    count_low: int = 12
    count_medium: int = 10
    count_high: int = 10
    page_w: int = 1700
    page_h: int = 2200

    def __post_init__(self):
        if min(self.count_low, self.count_medium, self.count_high) < 0:
            raise ValueError("counts must be >= 0")
        if self.page_w < 256 or self.page_h < 256:
            raise ValueError("page dimensions must be >= 256")

    @property
    def total(self) -> int:
        return self.count_low + self.count_medium + self.count_high


@dataclass(frozen=True)
class CorpusItem:
    image: Image
    intended_class: ComplexityClass
    entry: dict

    @property
    def filename(self) -> str:
        return self.entry["file"]


def stripe_block(page: np.ndarray, x: int, y: int, w: int, h: int, rng: np.random.Generator) -> None:
    """Paint a paragraph of dashed 4-px text lines into page[y:y+h, x:x+w]."""
    ink = int(rng.integers(10, 50))
    for top in range(y, y + h - STRIPE + 1, 2 * STRIPE):
        cursor = x
        end = x + w
        if top + 2 * STRIPE * 2 > y + h:
            end = x + int(w * rng.uniform(0.3, 0.9))  # ragged last line
        while cursor < end:
            word = int(rng.integers(16, 64))
            page[top:top + STRIPE, cursor:min(cursor + word, end)] = ink
            cursor += word + int(rng.integers(10, 20))


def rule_line(page: np.ndarray, x: int, y: int, w: int, thickness: int = 2) -> None:
    page[y:y + thickness, x:x + w] = 0


def table_grid(page: np.ndarray, x: int, y: int, w: int, h: int, rng: np.random.Generator) -> None:
    """1-px rules on irregular 40-80 px spacing, every cell filled with text."""
    xs = [x]
    while xs[-1] < x + w:
        xs.append(min(x + w, xs[-1] + int(rng.integers(40, 81)) * 2))
    ys = [y]
    while ys[-1] < y + h:
        ys.append(min(y + h, ys[-1] + int(rng.integers(40, 81))))
    for cx0, cx1 in zip(xs[:-1], xs[1:]):
        for cy0, cy1 in zip(ys[:-1], ys[1:]):
            if cx1 - cx0 > 12 and cy1 - cy0 > 12:
                stripe_block(page, cx0 + 4, cy0 + 4, cx1 - cx0 - 8, cy1 - cy0 - 8, rng)
    for gx in xs:
        page[y:y + h, min(gx, x + w - 1)] = 0
    for gy in ys:
        page[min(gy, y + h - 1), x:x + w] = 0


def _low_page(page: np.ndarray, rng: np.random.Generator) -> None:
    H, W = page.shape
    bw = int(W * rng.uniform(0.30, 0.45))
    bh = int(H * rng.uniform(0.10, 0.18))
    x = int(rng.integers(int(W * 0.2), W - bw - int(W * 0.2) + 1))
    y = int(rng.integers(int(H * 0.2), H - bh - int(H * 0.2) + 1))
    stripe_block(page, x, y, bw, bh, rng)


def _medium_page(page: np.ndarray, rng: np.random.Generator) -> None:
    H, W = page.shape
    n = int(rng.integers(2, 4))
    bw = int(W * rng.uniform(0.52, 0.60))
    x = int(rng.integers(int(W * 0.08), W - bw - int(W * 0.08) + 1))
    total_h = int(H * rng.uniform(0.44, 0.52))
    gap = int(H * 0.04)
    bh = (total_h - gap * (n - 1)) // n
    y = int(rng.integers(int(H * 0.08), H - total_h - int(H * 0.12) + 1))
    rule_line(page, x, max(0, y - gap // 2), bw)
    for _ in range(n):
        stripe_block(page, x, y, bw, bh, rng)
        y += bh + gap


def _high_page(page: np.ndarray, rng: np.random.Generator) -> None:
    H, W = page.shape
    mx = int(W * rng.uniform(0.03, 0.05))
    my = int(H * rng.uniform(0.03, 0.05))
    table_grid(page, mx, my, W - 2 * mx, H - 2 * my, rng)


_PAINTERS = {
    ComplexityClass.LOW: _low_page,
    ComplexityClass.MEDIUM: _medium_page,
    ComplexityClass.HIGH: _high_page,
}


def coverage(page: np.ndarray) -> float:
    """Area of the bounding box of all non-white pixels as a fraction of the page."""
    dark = page < WHITE
    rows = np.flatnonzero(dark.any(axis=1))
    if rows.size == 0:
        return 0.0
    cols = np.flatnonzero(dark.any(axis=0))
    return float((rows[-1] - rows[0] + 1) * (cols[-1] - cols[0] + 1) / page.size)


def generate(spec: CorpusSpec | None = None) -> list[CorpusItem]:
    spec = spec or CorpusSpec()
    rng = np.random.default_rng(spec.seed)
    plan = (
        [ComplexityClass.LOW] * spec.count_low
        + [ComplexityClass.MEDIUM] * spec.count_medium
        + [ComplexityClass.HIGH] * spec.count_high
    )
    items = []
    for index, cls in enumerate(plan):
        page = np.full((spec.page_h, spec.page_w), WHITE, dtype=np.uint8)
        _PAINTERS[cls](page, rng)
        entry = {
            "file": f"page_{index:03d}_{cls.value.lower()}.png",
            "index": index,
            "intended_class": cls.value,
            "width": spec.page_w,
            "height": spec.page_h,
            "seed": spec.seed,
        }
        items.append(CorpusItem(Image(page), cls, entry))
    return items


def write_corpus(items: list[CorpusItem], out_dir, spec: CorpusSpec | None = None) -> Path:
    """Write one PNG per page plus manifest.json; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for item in items:
        (out / item.filename).write_bytes(encode_png(item.image))
    manifest = {
        "seed": spec.seed if spec else (items[0].entry["seed"] if items else None),
        "images": [item.entry for item in items],
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path
