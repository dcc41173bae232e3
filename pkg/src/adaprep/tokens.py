"""Patch-grid visual token accounting."""

from __future__ import annotations

from dataclasses import dataclass


class UnalignedDims(ValueError):
    pass


@dataclass(frozen=True)
class TokenStats:
    width: int
    height: int
    patch: int
    token_count: int

    @classmethod
    def for_dims(cls, width: int, height: int, patch: int) -> "TokenStats":
        return cls(width, height, patch, token_count(width, height, patch))


def snap_dims(w: int, h: int, patch: int) -> tuple[int, int]:
    """Round each side up to a whole number of patches (at least one)."""
    if w < 1 or h < 1 or patch < 1:
        raise ValueError("dimensions and patch must be >= 1")
    return -(-w // patch) * patch, -(-h // patch) * patch


def token_count(w: int, h: int, patch: int) -> int:
    if w < 1 or h < 1 or w % patch or h % patch:
        raise UnalignedDims(f"{w}x{h} is not a positive multiple of patch {patch}")
    return (w // patch) * (h // patch)


def reduction(base: TokenStats | int, adapt: TokenStats | int) -> float:
    """1 - adapt/base. Negative when the adaptive path produced more tokens."""
    b = base.token_count if isinstance(base, TokenStats) else int(base)
    a = adapt.token_count if isinstance(adapt, TokenStats) else int(adapt)
    if b < 1:
        raise ValueError("baseline token count must be >= 1")
    return 1.0 - a / b
