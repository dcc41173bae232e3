"""Static baseline and adaptive preprocessing paths."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analyzer import AnalyzerConfig, ComplexityClass, ComplexityReport, analyze
from .cropper import CropBox, CropConfig, crop, find_crop_box
from .imgcore import Channels, Image, fit_long_side, resize, to_gray
from .policy import ResolutionPolicy, select_resolution
from .quality import QualityScore, quality_score
from .tokens import TokenStats, snap_dims, token_count


@dataclass(frozen=True)
class PipelineConfig:
    analyzer: AnalyzerConfig = field(default_factory=AnalyzerConfig)
    policy: ResolutionPolicy = field(default_factory=ResolutionPolicy)
    crop: CropConfig = field(default_factory=CropConfig)


@dataclass(frozen=True)
class PreprocessPlan:
    """Audit record for one adaptive run.

    `crop_box` is None for the full frame. `resized_dims` is the content size
    before snap padding and `pad_offset` where that content sits in the output.
    """

    complexity: ComplexityReport
    crop_box: CropBox | None
    target_side: int
    resized_dims: tuple[int, int]
    pad_offset: tuple[int, int]
    output_dims: tuple[int, int]
    predicted_tokens: int
    source_dims: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "complexity": self.complexity.to_dict(),
            "crop_box": self.crop_box.to_dict() if self.crop_box else "FullFrame",
            "target_side": self.target_side,
            "resized_dims": list(self.resized_dims),
            "pad_offset": list(self.pad_offset),
            "output_dims": list(self.output_dims),
            "predicted_tokens": self.predicted_tokens,
            "source_dims": list(self.source_dims),
        }


def pad_to(img: Image, out_w: int, out_h: int) -> tuple[Image, tuple[int, int]]:
    """Centre `img` on a white canvas of the given size."""
    if (out_w, out_h) == img.size:
        return img, (0, 0)
    ox, oy = (out_w - img.width) // 2, (out_h - img.height) // 2
    shape = (out_h, out_w) if img.channels is Channels.GRAY8 else (out_h, out_w, 3)
    canvas = np.full(shape, 255, dtype=np.uint8)
    canvas[oy:oy + img.height, ox:ox + img.width] = img.pixels
    return Image(canvas), (ox, oy)


def _snap(img: Image, patch: int) -> tuple[Image, tuple[int, int]]:
    return pad_to(img, *snap_dims(img.width, img.height, patch))


def baseline_preprocess(img: Image, policy: ResolutionPolicy | None = None) -> tuple[Image, TokenStats]:
    """Resize so the long side equals the baseline side (upscaling allowed), then snap-pad."""
    policy = policy or ResolutionPolicy()
    resized = resize(img, *fit_long_side(img.width, img.height, policy.baseline_side))
    out, _ = _snap(resized, policy.patch)
    return out, TokenStats.for_dims(out.width, out.height, policy.patch)


def adaptive_preprocess(
    img: Image,
    cfg: PipelineConfig | None = None,
    *,
    force_class: ComplexityClass | None = None,
) -> tuple[Image, PreprocessPlan]:
    cfg = cfg or PipelineConfig()
    report = analyze(img, cfg.analyzer)
    tier = select_resolution(force_class or report.complexity_class, cfg.policy)

    box = None
    region = img
    if cfg.crop.enabled:
        box = find_crop_box(to_gray(img), cfg.crop)
        if box is not None and box.area == img.width * img.height:
            box = None
        if box is not None:
            region = crop(img, box)

    if max(region.width, region.height) > tier:
        region = resize(region, *fit_long_side(region.width, region.height, tier))
    out, offset = _snap(region, cfg.policy.patch)
    plan = PreprocessPlan(
        complexity=report,
        crop_box=box,
        target_side=tier,
        resized_dims=region.size,
        pad_offset=offset,
        output_dims=out.size,
        predicted_tokens=token_count(out.width, out.height, cfg.policy.patch),
        source_dims=img.size,
    )
    return out, plan


def project_to_baseline(
    adaptive_img: Image, plan: PreprocessPlan, policy: ResolutionPolicy
) -> Image:
    """Place the adaptive content where it sits in the baseline frame.

    The snap padding is stripped, the content is resampled to the size its
    source region occupies in the baseline output, and everything outside that
    region is left white: cropped-away content counts as lost.
    """
    src_w, src_h = plan.source_dims
    bw, bh = fit_long_side(src_w, src_h, policy.baseline_side)
    out_w, out_h = snap_dims(bw, bh, policy.patch)
    sx, sy = bw / src_w, bh / src_h
    ox, oy = plan.pad_offset
    rw, rh = plan.resized_dims
    content = Image(np.array(adaptive_img.pixels[oy:oy + rh, ox:ox + rw]))

    box = plan.crop_box or CropBox(0, 0, src_w, src_h)
    x0 = int(box.x * sx + 0.5)
    y0 = int(box.y * sy + 0.5)
    x1 = min(bw, max(x0 + 1, int((box.x + box.w) * sx + 0.5)))
    y1 = min(bh, max(y0 + 1, int((box.y + box.h) * sy + 0.5)))
    x0, y0 = min(x0, x1 - 1), min(y0, y1 - 1)
    placed = resize(content, x1 - x0, y1 - y0)

    shape = (bh, bw) if content.channels is Channels.GRAY8 else (bh, bw, 3)
    frame = np.full(shape, 255, dtype=np.uint8)
    frame[y0:y1, x0:x1] = placed.pixels
    out, _ = pad_to(Image(frame), out_w, out_h)
    return out


def paired_quality(
    baseline_img: Image, adaptive_img: Image, plan: PreprocessPlan, policy: ResolutionPolicy
) -> QualityScore:
    if (
        plan.crop_box is None
        and plan.resized_dims == fit_long_side(*plan.source_dims, policy.baseline_side)
        and adaptive_img.size == baseline_img.size
    ):
        # same geometry as the baseline: compare directly
        return quality_score(baseline_img, adaptive_img)
    return quality_score(baseline_img, project_to_baseline(adaptive_img, plan, policy))
