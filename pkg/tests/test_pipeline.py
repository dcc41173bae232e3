import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaprep.analyzer import ComplexityClass
from adaprep.corpus import stripe_block, table_grid
from adaprep.cropper import CropConfig
from adaprep.imgcore import Image
from adaprep.pipeline import (
    PipelineConfig,
    adaptive_preprocess,
    baseline_preprocess,
    pad_to,
    paired_quality,
    project_to_baseline,
)
from adaprep.policy import ResolutionPolicy
from adaprep.tokens import reduction
from conftest import blank

COLLAPSE = PipelineConfig(policy=ResolutionPolicy.uniform(1024), crop=CropConfig(enabled=False))


def sparse_letter(w=1700, h=2200, seed=3):
    """Letterhead, two short paragraphs and a signature spread over the central ~60% of the page."""
    rng = np.random.default_rng(seed)
    page = np.full((h, w), 255, dtype=np.uint8)
    x0, y0 = int(w * 0.12), int(h * 0.12)
    x1, y1 = int(w * 0.88), int(h * 0.88)
    stripe_block(page, x0, y0, int(w * 0.3), 24, rng)                # letterhead
    stripe_block(page, x1 - int(w * 0.25), y0 + 60, int(w * 0.25), 24, rng)  # date/address
    stripe_block(page, x0, int(h * 0.35), int(w * 0.5), 64, rng)
    stripe_block(page, x0, int(h * 0.55), int(w * 0.45), 48, rng)
    stripe_block(page, x0, y1 - 24, int(w * 0.15), 24, rng)         # signature
    return Image(page), (x0, y0, x1, y1)


def dense_table(w=1700, h=2200, seed=5):
    rng = np.random.default_rng(seed)
    page = np.full((h, w), 255, dtype=np.uint8)
    table_grid(page, 40, 40, w - 80, h - 80, rng)
    return Image(page)


class TestBaseline:
    @pytest.mark.parametrize(
        "src, dims, tokens",
        [((2048, 1536), (1024, 768), 192), ((1024, 1024), (1024, 1024), 256), ((500, 500), (1024, 1024), 256), ((1700, 2200), (832, 1024), 208)],
    )
    def test_dims_and_tokens(self, src, dims, tokens):
        out, stats = baseline_preprocess(blank(*src, value=200))
        assert out.size == dims
        assert stats.token_count == tokens

    def test_content_agnostic(self):
        a, sa = baseline_preprocess(blank(1700, 2200))
        b, sb = baseline_preprocess(dense_table())
        assert a.size == b.size and sa == sb


class TestAdaptive:
    def test_blank_page(self):
        out, plan = adaptive_preprocess(blank(1024, 1024))
        assert plan.complexity.complexity_class is ComplexityClass.LOW
        assert plan.crop_box is None
        assert plan.to_dict()["crop_box"] == "FullFrame"
        assert plan.target_side == 512 and out.size == (512, 512)
        assert plan.predicted_tokens == 64
        assert reduction(256, plan.predicted_tokens) == 0.75
        assert (out.pixels == 255).all()

    def test_dense_table_stays_high(self):
        img = dense_table()
        _, base = baseline_preprocess(img)
        _, plan = adaptive_preprocess(img)
        assert plan.complexity.complexity_class is ComplexityClass.HIGH
        assert reduction(base, plan.predicted_tokens) <= 0.15

    def test_sparse_letter(self):
        img, (x0, y0, x1, y1) = sparse_letter()
        assert (x1 - x0) * (y1 - y0) / (img.width * img.height) == pytest.approx(0.58, abs=0.03)
        _, base = baseline_preprocess(img)
        out, plan = adaptive_preprocess(img)
        assert plan.complexity.complexity_class is ComplexityClass.LOW
        assert plan.crop_box is not None
        assert plan.target_side == 512 and max(plan.resized_dims) == 512
        assert reduction(base, plan.predicted_tokens) >= 0.55

    def test_never_upscales(self):
        img = Image(np.pad(np.zeros((20, 30), np.uint8), 40, constant_values=255))
        out, plan = adaptive_preprocess(img)
        assert max(plan.resized_dims) <= max(img.size)
        assert plan.resized_dims == (plan.crop_box.w, plan.crop_box.h)
        assert out.size == (64, 64)

    def test_no_crop_flag(self):
        img, _ = sparse_letter()
        _, plan = adaptive_preprocess(img, PipelineConfig(crop=CropConfig(enabled=False)))
        assert plan.crop_box is None

    def test_rgb_input(self):
        px = np.full((300, 400, 3), 255, np.uint8)
        px[100:200, 100:300] = (200, 30, 30)
        out, plan = adaptive_preprocess(Image(px))
        assert out.channels == Image(px).channels
        assert plan.output_dims == out.size

    def test_plan_consistency(self, small_corpus):
        patch = ResolutionPolicy().patch
        for item in small_corpus:
            out, plan = adaptive_preprocess(item.image)
            assert plan.output_dims == out.size
            assert out.width % patch == 0 and out.height % patch == 0
            assert plan.predicted_tokens == (out.width // patch) * (out.height // patch)
            assert max(plan.resized_dims) <= plan.target_side
            ox, oy = plan.pad_offset
            rw, rh = plan.resized_dims
            assert 0 <= ox and ox + rw <= out.width and 0 <= oy and oy + rh <= out.height
            assert plan.source_dims == item.image.size

    def test_deterministic(self, small_corpus):
        for item in small_corpus[:3]:
            a, pa = adaptive_preprocess(item.image)
            b, pb = adaptive_preprocess(item.image)
            assert a.tobytes() == b.tobytes() and pa == pb


class TestCollapse:
    def test_corpus(self, small_corpus):
        for item in small_corpus:
            base, stats = baseline_preprocess(item.image, COLLAPSE.policy)
            out, plan = adaptive_preprocess(item.image, COLLAPSE)
            assert out.size == base.size
            assert plan.predicted_tokens == stats.token_count
            assert out.tobytes() == base.tobytes()
            q = paired_quality(base, out, plan, COLLAPSE.policy)
            assert q.value == 1.0

    @settings(max_examples=15, deadline=None)
    @given(st.integers(1024, 2600), st.integers(1024, 2600), st.integers(0, 2**31))
    def test_large_random_images(self, w, h, seed):
        rng = np.random.default_rng(seed)
        img = Image(rng.integers(0, 256, (h // 8, w // 8), dtype=np.uint8).repeat(8, 0).repeat(8, 1))
        base, _ = baseline_preprocess(img, COLLAPSE.policy)
        out, _ = adaptive_preprocess(img, COLLAPSE)
        assert out.size == base.size


def test_selectivity(corpus):
    for item in corpus:
        _, plan = adaptive_preprocess(item.image)
        if plan.complexity.complexity_class is ComplexityClass.HIGH:
            _, low = adaptive_preprocess(item.image, force_class=ComplexityClass.LOW)
            assert plan.predicted_tokens >= low.predicted_tokens


class TestProjection:
    def test_full_frame_projection_matches_baseline_size(self):
        img = blank(1700, 2200, 255)
        base, _ = baseline_preprocess(img)
        out, plan = adaptive_preprocess(img)
        proj = project_to_baseline(out, plan, ResolutionPolicy())
        assert proj.size == base.size
        assert (proj.pixels == 255).all()

    def test_cropped_content_lands_in_place(self):
        px = np.full((1000, 1000), 255, np.uint8)
        px[400:600, 300:700] = 0
        img = Image(px)
        base, _ = baseline_preprocess(img)
        out, plan = adaptive_preprocess(img)
        proj = project_to_baseline(out, plan, ResolutionPolicy())
        assert proj.size == base.size
        # the block centre is dark in both frames, the far corner white
        assert proj.pixels[512, 512] < 30 and base.pixels[512, 512] < 30
        assert proj.pixels[20, 20] == 255
        assert paired_quality(base, out, plan, ResolutionPolicy()).value > 0.9


def test_pad_to_centres():
    out, (ox, oy) = pad_to(blank(3, 2, 0), 8, 6)
    assert (ox, oy) == (2, 2)
    assert out.pixels[2:4, 2:5].max() == 0 and out.pixels.sum() == 255 * (48 - 6)
