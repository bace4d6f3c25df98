"""Numeric comparison of structured gradients (shared by CLI and tests)."""
from __future__ import annotations

from .values import zip_scalars


def max_deviation(ty, a, b) -> tuple[float, float]:
    """(max absolute difference, max relative difference) over all scalar
    leaves of two same-shaped values; raises on shape mismatch."""
    max_abs = 0.0
    max_rel = 0.0
    for x, y in zip_scalars(ty, a, b):
        d = abs(x - y)
        max_abs = max(max_abs, d)
        m = max(abs(x), abs(y))
        if m > 0.0:
            max_rel = max(max_rel, d / m)
        elif d != d or d > 0.0:  # nan or inf disagreement
            max_rel = float("inf")
    return max_abs, max_rel


def values_close(ty, a, b, rtol: float, atol: float = 0.0) -> bool:
    for x, y in zip_scalars(ty, a, b):
        if x == y:
            continue
        d = abs(x - y)
        if not (d <= atol + rtol * max(abs(x), abs(y))):
            return False
    return True


def values_equal(ty, a, b) -> bool:
    return all(x == y for x, y in zip_scalars(ty, a, b))
