"""
Raster primitives shared by every stage: decode/encode, grayscale,
resizing, Sobel gradients and histograms.

Images are uint8 numpy arrays wrapped in a small immutable value type:
shape (h, w) for Gray8 and (h, w, 3) for Rgb8.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass

import cv2
import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError


class DecodeError(ValueError):
    """Malformed or unsupported encoded image."""


class InvalidDimensions(ValueError):
    pass


class Channels(enum.Enum):
    GRAY8 = 1
    RGB8 = 3


@dataclass(frozen=True, eq=False)
class Image:
    """Decoded 8-bit raster, row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        px = self.pixels
        if not isinstance(px, np.ndarray) or px.dtype != np.uint8:
            raise TypeError("pixels must be a uint8 numpy array")
        if px.ndim == 3 and px.shape[2] == 1:
            px = px[:, :, 0]
        if not (px.ndim == 2 or (px.ndim == 3 and px.shape[2] == 3)):
            raise ValueError(f"unsupported pixel array shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise InvalidDimensions(f"image must be at least 1x1, got {px.shape[1]}x{px.shape[0]}")
        view = np.ascontiguousarray(px).view()
        view.flags.writeable = False
        object.__setattr__(self, "pixels", view)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> Channels:
        return Channels.GRAY8 if self.pixels.ndim == 2 else Channels.RGB8

    @property
    def size(self) -> tuple[int, int]:
        return self.width, self.height

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"Image({self.width}x{self.height}, {self.channels.name})"

    @classmethod
    def from_bytes(cls, width: int, height: int, channels: Channels, data: bytes) -> "Image":
        n = width * height * channels.value
        if len(data) != n:
            raise ValueError(f"buffer length {len(data)} != {width}x{height}x{channels.value}")
        arr = np.frombuffer(data, dtype=np.uint8)
        shape = (height, width) if channels is Channels.GRAY8 else (height, width, 3)
        return cls(arr.reshape(shape).copy())


@dataclass(frozen=True, eq=False)
class GradientMap:
    magnitudes: np.ndarray  # uint8, (h, w)

    @property
    def width(self) -> int:
        return self.magnitudes.shape[1]

    @property
    def height(self) -> int:
        return self.magnitudes.shape[0]


def _over_white(color: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    c = color.astype(np.uint32)
    a = alpha.astype(np.uint32)
    if c.ndim == 3:
        a = a[:, :, None]
    out = (c * a + 255 * (255 - a) + 127) // 255
    return out.astype(np.uint8)


def decode(data: bytes) -> Image:
    """Decode a PNG or JPEG byte stream into Gray8 or Rgb8.

    16-bit samples are narrowed to 8 bits and alpha is composited over white.
    """
    try:
        pil = PILImage.open(io.BytesIO(data))
        fmt = pil.format
        pil.load()
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc
    if fmt not in ("PNG", "JPEG"):
        raise DecodeError(f"unsupported format {fmt!r}")

    mode = pil.mode
    if mode == "P":
        pil = pil.convert("RGBA" if "transparency" in pil.info else "RGB")
        mode = pil.mode
    if mode in ("1", "L"):
        return Image(np.asarray(pil.convert("L"), dtype=np.uint8))
    if mode == "LA":
        arr = np.asarray(pil)
        return Image(_over_white(arr[:, :, 0], arr[:, :, 1]))
    if mode.startswith("I"):
        arr = np.asarray(pil).astype(np.int64)
        if mode == "I" and arr.max(initial=0) <= 255:
            return Image(np.clip(arr, 0, 255).astype(np.uint8))
        return Image(np.clip((arr + 128) // 257, 0, 255).astype(np.uint8))
    if mode == "RGB":
        return Image(np.asarray(pil, dtype=np.uint8))
    if mode == "RGBA":
        arr = np.asarray(pil)
        return Image(_over_white(arr[:, :, :3], arr[:, :, 3]))
    if mode in ("CMYK", "YCbCr"):
        return Image(np.asarray(pil.convert("RGB"), dtype=np.uint8))
    raise DecodeError(f"unsupported color model {mode!r}")


def encode_png(img: Image) -> bytes:
    buf = io.BytesIO()
    PILImage.fromarray(np.asarray(img.pixels)).save(buf, format="PNG")
    return buf.getvalue()


def read_image(path) -> Image:
    with open(path, "rb") as fh:
        return decode(fh.read())


def write_png(img: Image, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png(img))


def to_gray(img: Image) -> Image:
    """BT.601 luma, round half up. Gray8 input is returned as is."""
    if img.channels is Channels.GRAY8:
        return img
    rgb = img.pixels.astype(np.uint32)
    luma = (299 * rgb[:, :, 0] + 587 * rgb[:, :, 1] + 114 * rgb[:, :, 2] + 500) // 1000
    return Image(luma.astype(np.uint8))


def resize(img: Image, out_w: int, out_h: int) -> Image:
    """Bilinear resize in source space.

    Upsampling is plain bilinear interpolation with pixel centres at
    half-integer positions. Downsampling widens the triangle kernel to the
    reduction factor so thin strokes are averaged instead of aliased; at 4x
    and beyond an integer box reduction runs first to bound the cost.
    """
    out_w, out_h = int(out_w), int(out_h)
    if out_w < 1 or out_h < 1:
        raise InvalidDimensions(f"target size must be >= 1x1, got {out_w}x{out_h}")
    if (out_w, out_h) == img.size:
        return img
    pil = PILImage.fromarray(np.asarray(img.pixels))
    out = pil.resize((out_w, out_h), PILImage.BILINEAR, reducing_gap=2.0)
    return Image(np.asarray(out, dtype=np.uint8))


def fit_long_side(w: int, h: int, side: int) -> tuple[int, int]:
    """Aspect-preserving dimensions whose long side equals `side`."""
    if w >= h:
        return side, max(1, int(h * side / w + 0.5))
    return max(1, int(w * side / h + 0.5)), side


def gradient_energy(gray: Image) -> np.ndarray:
    """Squared Sobel response gx**2 + gy**2 (int32), edge-replicated borders."""
    if gray.channels is not Channels.GRAY8:
        raise ValueError("gradient requires a Gray8 image")
    px = np.asarray(gray.pixels)
    gx = cv2.Sobel(px, cv2.CV_16S, 1, 0, ksize=3, borderType=cv2.BORDER_REPLICATE).astype(np.int32)
    gy = cv2.Sobel(px, cv2.CV_16S, 0, 1, ksize=3, borderType=cv2.BORDER_REPLICATE).astype(np.int32)
    return gx * gx + gy * gy


def energy_cutoff(grad_threshold: int) -> int:
    """Smallest squared response whose normalized magnitude reaches `grad_threshold`.

    magnitude = floor(sqrt(e) / 4 + 0.5) >= t  <=>  e >= (4t - 2)**2  for t >= 1.
    """
    return (4 * int(grad_threshold) - 2) ** 2


def gradient_magnitude(gray: Image) -> GradientMap:
    """3x3 Sobel magnitude scaled by 1/4, rounded half up, clamped to 255."""
    energy = gradient_energy(gray)
    mag = np.floor(np.sqrt(energy) / 4.0 + 0.5)
    return GradientMap(np.minimum(mag, 255).astype(np.uint8))


def histogram256(gray: Image) -> np.ndarray:
    if gray.channels is not Channels.GRAY8:
        raise ValueError("histogram requires a Gray8 image")
    return np.bincount(np.asarray(gray.pixels).ravel(), minlength=256).astype(np.int64)
