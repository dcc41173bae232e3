"""Content mask, padded bounding box and crop."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imgcore import Channels, Image, energy_cutoff, gradient_energy


class OutOfBounds(ValueError):
    pass


@dataclass(frozen=True)
class CropConfig:
    grad_threshold: int = 32
    bg_delta: int = 24
    margin_frac: float = 0.02
    min_area_frac: float = 0.10
    enabled: bool = True

    def __post_init__(self):
        if not 1 <= self.grad_threshold <= 255:
            raise ValueError("grad_threshold must be in [1, 255]")
        if not 0 <= self.bg_delta <= 255:
            raise ValueError("bg_delta must be in [0, 255]")
        if not 0 <= self.margin_frac <= 0.2:
            raise ValueError("margin_frac must be in [0, 0.2]")
        if not 0 < self.min_area_frac <= 1:
            raise ValueError("min_area_frac must be in (0, 1]")


@dataclass(frozen=True)
class CropBox:
    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h

    def contains(self, x: int, y: int) -> bool:
        return self.x <= x < self.x + self.w and self.y <= y < self.y + self.h

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}


def border_mode(px: np.ndarray) -> int:
    """Most frequent value on the 1-px border ring (lowest value wins ties)."""
    if px.shape[0] <= 2 or px.shape[1] <= 2:
        ring = px.ravel()
    else:
        ring = np.concatenate([px[0], px[-1], px[1:-1, 0], px[1:-1, -1]])
    return int(np.argmax(np.bincount(ring, minlength=256)))


def content_mask(gray: Image, cfg: CropConfig | None = None) -> np.ndarray:
    """Boolean mask of pixels that differ from the background or sit on an edge."""
    cfg = cfg or CropConfig()
    if gray.channels is not Channels.GRAY8:
        raise ValueError("content_mask requires a Gray8 image")
    px = np.asarray(gray.pixels)
    bg = border_mode(px)
    lo, hi = bg - cfg.bg_delta, bg + cfg.bg_delta
    # |v - bg| >= delta, with delta == 0 marking every pixel
    mask = (px <= lo) | (px >= hi) if cfg.bg_delta > 0 else np.ones(px.shape, dtype=bool)
    mask |= gradient_energy(gray) >= energy_cutoff(cfg.grad_threshold)
    return mask


def _floor_dims(bw: int, bh: int, W: int, H: int, target: int) -> tuple[int, int]:
    # smallest area >= target that still holds the box, then closest aspect
    want = math.log(bw / bh)
    best = None
    for h in range(bh, H + 1):
        w = max(bw, -(-target // h))
        if w > W:
            continue
        key = (w * h, abs(math.log(w / h) - want), -h)
        if best is None or key < best[0]:
            best = (key, w, h)
    return best[1], best[2]


def _span(flags: np.ndarray) -> tuple[int, int] | None:
    idx = np.flatnonzero(flags)
    if idx.size == 0:
        return None
    return int(idx[0]), int(idx[-1]) + 1


def tight_bbox(mask: np.ndarray) -> tuple[int, int, int, int] | None:
    """(x0, y0, x1, y1) of the true pixels, half-open; None for an empty mask."""
    rows = _span(mask.any(axis=1))
    if rows is None:
        return None
    cols = _span(mask.any(axis=0))
    return cols[0], rows[0], cols[1], rows[1]


def pad_box(tight: tuple[int, int, int, int], W: int, H: int, cfg: CropConfig) -> CropBox:
    """Apply margin padding and the minimum-area floor to a tight box."""
    x0, y0, x1, y1 = tight
    mx = int(cfg.margin_frac * W + 0.5)
    my = int(cfg.margin_frac * H + 0.5)
    x0, x1 = max(0, x0 - mx), min(W, x1 + mx)
    y0, y1 = max(0, y0 - my), min(H, y1 + my)
    bw, bh = x1 - x0, y1 - y0

    target = math.ceil(cfg.min_area_frac * W * H - 1e-9)
    if bw * bh < target:
        w, h = _floor_dims(bw, bh, W, H, target)
        x0 = min(max(0, math.floor(x0 + (bw - w) / 2 + 0.5)), W - w)
        y0 = min(max(0, math.floor(y0 + (bh - h) / 2 + 0.5)), H - h)
        bw, bh = w, h
    return CropBox(x0, y0, bw, bh)


def content_bbox(mask: np.ndarray, cfg: CropConfig | None = None) -> CropBox | None:
    """Padded bounding box of the true pixels; None when the mask is empty."""
    cfg = cfg or CropConfig()
    mask = np.asarray(mask, dtype=bool)
    tight = tight_bbox(mask)
    if tight is None:
        return None
    return pad_box(tight, mask.shape[1], mask.shape[0], cfg)


def _union(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), max(a[3], b[3])


def _edge_bbox(px: np.ndarray, x0: int, y0: int, x1: int, y1: int, cutoff: int):
    """Tight box of gradient-clause pixels inside [x0, x1) x [y0, y1), in page coordinates."""
    if x0 >= x1 or y0 >= y1:
        return None
    H, W = px.shape
    cx0, cy0 = max(0, x0 - 1), max(0, y0 - 1)
    cx1, cy1 = min(W, x1 + 1), min(H, y1 + 1)
    # one pixel of real context where available; replication only at page borders
    window = Image(np.ascontiguousarray(px[cy0:cy1, cx0:cx1]))
    energy = gradient_energy(window)[y0 - cy0:y1 - cy0, x0 - cx0:x1 - cx0]
    box = tight_bbox(energy >= cutoff)
    if box is None:
        return None
    return box[0] + x0, box[1] + y0, box[2] + x0, box[3] + y0


def content_tight_bbox(gray: Image, cfg: CropConfig | None = None) -> tuple[int, int, int, int] | None:
    """Same result as tight_bbox(content_mask(gray, cfg)) without a full-page Sobel pass.

    Gradient-clause pixels lie within one pixel of a pixel that differs from
    the background, so Sobel only runs on the strips between the luma-clause
    box and that dilated region.
    """
    cfg = cfg or CropConfig()
    px = np.asarray(gray.pixels)
    H, W = px.shape
    if cfg.bg_delta == 0:
        return 0, 0, W, H
    bg = border_mode(px)
    differs = tight_bbox(px != bg)
    if differs is None:
        return None
    luma = tight_bbox((px <= bg - cfg.bg_delta) | (px >= bg + cfg.bg_delta))
    dx0, dy0 = max(0, differs[0] - 1), max(0, differs[1] - 1)
    dx1, dy1 = min(W, differs[2] + 1), min(H, differs[3] + 1)
    cutoff = energy_cutoff(cfg.grad_threshold)
    if luma is None:
        return _edge_bbox(px, dx0, dy0, dx1, dy1, cutoff)
    lx0, ly0, lx1, ly1 = luma
    box = luma
    for strip in (
        (dx0, dy0, dx1, ly0),   # above
        (dx0, ly1, dx1, dy1),   # below
        (dx0, ly0, lx0, ly1),   # left
        (lx1, ly0, dx1, ly1),   # right
    ):
        box = _union(box, _edge_bbox(px, *strip, cutoff))
    return box


def find_crop_box(gray: Image, cfg: CropConfig | None = None) -> CropBox | None:
    """content_bbox(content_mask(gray)) computed via the strip shortcut."""
    cfg = cfg or CropConfig()
    tight = content_tight_bbox(gray, cfg)
    if tight is None:
        return None
    return pad_box(tight, gray.width, gray.height, cfg)


def crop(img: Image, box: CropBox) -> Image:
    if box.w < 1 or box.h < 1 or box.x < 0 or box.y < 0 or box.x + box.w > img.width or box.y + box.h > img.height:
        raise OutOfBounds(f"{box} does not fit in {img.width}x{img.height}")
    return Image(np.array(img.pixels[box.y:box.y + box.h, box.x:box.x + box.w]))
