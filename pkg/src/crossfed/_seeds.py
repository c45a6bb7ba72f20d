"""Seed handling shared by every module that draws random numbers."""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def mask_seed(seed: int) -> int:
    """Map a signed 64-bit seed onto the nonnegative range numpy accepts."""
    return int(seed) & _MASK64


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(mask_seed(seed))
