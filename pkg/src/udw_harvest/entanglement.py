"""Negativity of the second-order two-detector state.

At second perturbative order the partially transposed state has a
single negative eigenvalue with the closed form below; no eigensolver
is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["SecondOrderState", "negativity"]


@dataclass(frozen=True)
class SecondOrderState:
    p_a: float
    p_b: float
    m: complex

    def __post_init__(self):
        if self.p_a < 0 or self.p_b < 0:
            raise ValueError("excitation probabilities must be non-negative")


def negativity(state: SecondOrderState) -> float:
    """max{0, sqrt((p_a - p_b)^2/4 + |m|^2) - (p_a + p_b)/2}.

    Reduces to max{0, |m| - p} for identical detectors (p_a == p_b).
    hypot keeps the m = 0 and p = 0 corner cases exact.
    """
    gap = math.hypot((state.p_a - state.p_b) / 2.0, abs(state.m))
    return max(0.0, gap - (state.p_a + state.p_b) / 2.0)
