"""Confidence intervals for Monte Carlo means.

Indicators get the Wilson score interval; bounded nonnegative statistics get
the normal approximation mean ± z·s/√n. Sums use ``math.fsum`` so the result
does not depend on the order in which samples were produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import stats

from ..errors import DomainError


@dataclass(frozen=True)
class ConfidenceSummary:
    estimate: float
    std_error: float
    low: float
    high: float


def z_value(level: float) -> float:
    """Two-sided standard normal quantile for ``level``."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"Confidence level must lie in (0, 1), got {level}")
    return float(stats.norm.ppf(0.5 + 0.5 * level))


def wilson_interval(successes: int, n: int, level: float = 0.99) -> Tuple[float, float]:
    if n < 1:
        raise DomainError("Need at least one trial")
    if not 0 <= successes <= n:
        raise DomainError(f"successes={successes} outside 0..{n}")
    z = z_value(level)
    p = successes / n
    denominator = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denominator
    half = z / denominator * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n))
    low = 0.0 if successes == 0 else max(0.0, min(centre - half, p))
    high = 1.0 if successes == n else min(1.0, max(centre + half, p))
    return low, high


def normal_interval(
    mean: float, std_error: float, level: float = 0.99
) -> Tuple[float, float]:
    z = z_value(level)
    return mean - z * std_error, mean + z * std_error


def indicator_summary(indicators: np.ndarray, level: float = 0.99) -> ConfidenceSummary:
    indicators = np.asarray(indicators, dtype=bool)
    n = indicators.size
    if n < 1:
        raise DomainError("Need at least one sample")
    successes = int(np.count_nonzero(indicators))
    p = successes / n
    low, high = wilson_interval(successes, n, level)
    return ConfidenceSummary(p, math.sqrt(p * (1.0 - p) / n), low, high)


def mean_summary(values: np.ndarray, level: float = 0.99) -> ConfidenceSummary:
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 1:
        raise DomainError("Need at least one sample")
    mean = math.fsum(values) / n
    if n > 1:
        variance = math.fsum((values - mean) ** 2) / (n - 1)
        std_error = math.sqrt(variance / n)
    else:
        std_error = 0.0
    low, high = normal_interval(mean, std_error, level)
    if std_error == 0.0:
        low = high = mean
    return ConfidenceSummary(mean, std_error, low, high)


def confidence_interval(
    values: np.ndarray, level: float = 0.99, indicator: bool = False
) -> Tuple[float, float]:
    """Wilson interval for 0/1 indicators, normal interval otherwise."""
    summary = indicator_summary(values, level) if indicator else mean_summary(values, level)
    return summary.low, summary.high
