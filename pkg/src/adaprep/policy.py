"""Complexity class -> encoding resolution tier."""

from __future__ import annotations

from dataclasses import dataclass

from .analyzer import ComplexityClass


@dataclass(frozen=True)
class ResolutionPolicy:
    """Long-side resolution per complexity tier.

    `baseline_side` follows `high_side` unless given explicitly.
    """

    low_side: int = 512
    medium_side: int = 768
    high_side: int = 1024
    baseline_side: int | None = None
    patch: int = 64

    def __post_init__(self):
        if self.baseline_side is None:
            object.__setattr__(self, "baseline_side", self.high_side)
        if self.patch < 1:
            raise ValueError("patch must be >= 1")
        if not self.low_side <= self.medium_side <= self.high_side:
            raise ValueError("tiers must satisfy low <= medium <= high")
        for name in ("low_side", "medium_side", "high_side", "baseline_side"):
            side = getattr(self, name)
            if side < 1 or side % self.patch:
                raise ValueError(f"{name}={side} must be a positive multiple of patch={self.patch}")

    @classmethod
    def uniform(cls, side: int, patch: int = 64) -> "ResolutionPolicy":
        """Degenerate policy: every tier equals the baseline."""
        return cls(side, side, side, side, patch)


def select_resolution(cls: ComplexityClass, policy: ResolutionPolicy) -> int:
    return {
        ComplexityClass.LOW: policy.low_side,
        ComplexityClass.MEDIUM: policy.medium_side,
        ComplexityClass.HIGH: policy.high_side,
    }[ComplexityClass(cls)]
