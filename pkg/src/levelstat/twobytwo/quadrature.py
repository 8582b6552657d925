"""Exact-to-rounding probabilities for the ordered eigenvalue pair.

Write τ = ω_1 - ω_2 and t = ω_1. For fixed τ both eigenvalues are t plus a
function of τ, so the conditional law of (E_1, E_2) given τ is a translate of
the overlap density ϱ(t) ϱ(t - τ). Every probability below is an integral
over τ of the pair overlap

    K(τ, w) = ∫_{-∞}^{w} ϱ(t) ϱ(t - τ) dt

which is evaluated exactly (ϱ is piecewise polynomial of degree <= 1, so a
three-point Gauss-Legendre rule per segment is exact). The outer τ integrand
is smooth between kinks that are located in closed form; each smooth piece is
integrated with two Gauss-Legendre orders and the difference is the residual.
Integrating in τ instead of in (E_1, E_2) removes the inverse square root at
the gap edge.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Tuple

import numpy as np
from scipy import special

from ..errors import QuadratureError
from ..operators.potentials import PotentialDistribution
from .model import TwoByTwoModel

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-6
LOW_ORDER = 16
HIGH_ORDER = 24
MAX_PANELS = 64
NODE_BUDGET = 500_000

_SEGMENT_NODES, _SEGMENT_WEIGHTS = special.roots_legendre(3)
_LOW = special.roots_legendre(LOW_ORDER)
_HIGH = special.roots_legendre(HIGH_ORDER)


def pair_overlap(dist: PotentialDistribution, tau, upper) -> np.ndarray:
    """K(τ, w) for broadcastable arrays τ and w."""
    tau, upper = np.broadcast_arrays(
        np.asarray(tau, dtype=float), np.asarray(upper, dtype=float)
    )
    knots = dist.breakpoints
    shape = tau.shape + (knots.size,)
    points = np.concatenate(
        [
            np.broadcast_to(knots, shape),
            knots + tau[..., None],
            upper[..., None],
        ],
        axis=-1,
    )
    points = np.sort(np.minimum(points, upper[..., None]), axis=-1)
    left, right = points[..., :-1], points[..., 1:]
    half = 0.5 * (right - left)
    nodes = (0.5 * (left + right))[..., None] + half[..., None] * _SEGMENT_NODES
    values = dist.density(nodes) * dist.density(nodes - tau[..., None, None])
    return np.sum(values @ _SEGMENT_WEIGHTS * half, axis=-1)


def overlap_total(dist: PotentialDistribution, tau) -> np.ndarray:
    """A(τ) = K(τ, ∞), the density of ω_1 - ω_2."""
    tau = np.asarray(tau, dtype=float)
    return pair_overlap(dist, tau, dist.support[1] + np.abs(tau) + 1.0)


def tau_range(dist: PotentialDistribution) -> Tuple[float, float]:
    return -dist.width, dist.width


def _knot_differences(dist: PotentialDistribution) -> np.ndarray:
    knots = dist.breakpoints
    return (knots[:, None] - knots[None, :]).ravel()


def _spread(model: TwoByTwoModel, tau):
    return np.hypot(tau + model.offset, model.gap)


def _upper_limit(model: TwoByTwoModel, tau, x, y):
    """w*(τ): the largest ω_1 with E_1 < x and E_2 < y."""
    spread = _spread(model, tau)
    ceiling = np.minimum(2.0 * x - spread, 2.0 * y + spread) - model.a - model.b
    return 0.5 * (ceiling + tau)


def _kinks(model: TwoByTwoModel, dist: PotentialDistribution, x, y) -> np.ndarray:
    """Candidate τ where K(τ, w*(τ)) may fail to be smooth; NaN marks no root.

    Shapes: x, y are (m, 1); returns (m, n_candidates).
    """
    alpha = model.offset
    coupling2 = model.gap**2
    knots = dist.breakpoints[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = 2.0 * x - model.a - model.b - 2.0 * knots
        gamma = 2.0 * knots - 2.0 * y + model.a + model.b
        branch = [
            (beta**2 - alpha**2 - coupling2) / (2.0 * (alpha - beta)),
            (beta**2 - alpha**2 - coupling2) / (2.0 * (alpha + beta)),
            (gamma**2 - alpha**2 - coupling2) / (2.0 * (alpha + gamma)),
            (gamma**2 - alpha**2 - coupling2) / (2.0 * (alpha - gamma)),
        ]
        switch = np.sqrt((x - y) ** 2 - coupling2)
        switch = np.where(x - y >= model.gap, switch, np.nan)
    m = np.broadcast(x, y).shape[0]
    fixed = np.concatenate([_knot_differences(dist), [-alpha]])
    return np.concatenate(
        [np.broadcast_to(fixed, (m, fixed.size))]
        + [np.broadcast_to(b, (m, knots.size)) for b in branch]
        + [switch - alpha, -switch - alpha],
        axis=-1,
    )


def _panel_count(model: TwoByTwoModel, span: float) -> int:
    return int(min(MAX_PANELS, max(2, math.ceil(span / max(model.gap, 1e-300)))))


def integrate_pieces(
    integrand: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    panels: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Row-wise ∫ integrand over [edges[:, 0], edges[:, -1]].

    ``edges`` (m, k) are sorted breakpoints; every piece is cut into
    ``panels`` equal panels. ``integrand`` maps τ of shape (m, n) to values of
    the same shape. Returns (value, residual) per row.
    """
    left, right = edges[:, :-1], edges[:, 1:]
    steps = np.linspace(0.0, 1.0, panels + 1)
    cuts = left[..., None] + (right - left)[..., None] * steps
    panel_left = cuts[..., :-1].reshape(edges.shape[0], -1)
    panel_right = cuts[..., 1:].reshape(edges.shape[0], -1)
    half = 0.5 * (panel_right - panel_left)
    mid = 0.5 * (panel_right + panel_left)

    def rule(nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
        tau = (mid[..., None] + half[..., None] * nodes).reshape(edges.shape[0], -1)
        values = integrand(tau).reshape(half.shape + (nodes.size,))
        return np.sum(values @ weights * half, axis=-1)

    high = rule(*_HIGH)
    low = rule(*_LOW)
    return high, np.abs(high - low)


def _check_residual(residual: np.ndarray, what: str) -> None:
    worst = float(np.max(residual)) if residual.size else 0.0
    if worst > RESIDUAL_TOLERANCE:
        raise QuadratureError(f"{what}: residual {worst:.3g} > {RESIDUAL_TOLERANCE}")


def _row_chunk(pieces: int, panels: int) -> int:
    nodes = pieces * panels * (LOW_ORDER + HIGH_ORDER) * 3
    return max(1, NODE_BUDGET // max(nodes, 1))


def corner_cdf(model: TwoByTwoModel, dist: PotentialDistribution, x, y) -> np.ndarray:
    """P{E_1 < x, E_2 < y} for broadcastable arrays x and y."""
    model.require_coupling()
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    x, y = x.reshape(-1, 1), y.reshape(-1, 1)
    low, high = tau_range(dist)
    panels = _panel_count(model, high - low)
    result = np.empty(x.shape[0])
    kinks = _kinks(model, dist, x[:1], y[:1])
    chunk = _row_chunk(kinks.shape[1] + 1, panels)
    for start in range(0, x.shape[0], chunk):
        xs, ys = x[start : start + chunk], y[start : start + chunk]
        candidates = np.nan_to_num(_kinks(model, dist, xs, ys), nan=high)
        edges = np.sort(
            np.concatenate(
                [np.full((xs.shape[0], 1), low), np.clip(candidates, low, high),
                 np.full((xs.shape[0], 1), high)],
                axis=-1,
            ),
            axis=-1,
        )

        def integrand(tau: np.ndarray) -> np.ndarray:
            return pair_overlap(dist, tau, _upper_limit(model, tau, xs, ys))

        values, residual = integrate_pieces(integrand, edges, panels)
        _check_residual(residual, "corner CDF")
        result[start : start + chunk] = values
    return result.reshape(shape)


def rectangle_mass(
    model: TwoByTwoModel,
    dist: PotentialDistribution,
    first: Tuple[float, float],
    second: Tuple[float, float],
) -> float:
    """P{E_1 ∈ [x0, x1), E_2 ∈ [y0, y1)}.

    The four-corner combination is integrated only over the τ where the
    spacing E_1 - E_2 can fall in (x0 - y1, x1 - y0), so small rectangles near
    the gap edge keep their relative accuracy.
    """
    model.require_coupling()
    (x0, x1), (y0, y1) = (tuple(map(float, first)), tuple(map(float, second)))
    if not (x0 < x1 and y0 < y1):
        raise ValueError(f"Empty rectangle [{x0},{x1}) x [{y0},{y1})")
    widest = x1 - y0
    if widest <= model.gap:
        return 0.0
    outer = math.sqrt((widest - model.gap) * (widest + model.gap))
    narrowest = max(x0 - y1, model.gap)
    inner = math.sqrt((narrowest - model.gap) * (narrowest + model.gap))
    low, high = tau_range(dist)
    alpha = model.offset
    windows = [(-alpha - outer, -alpha - inner), (-alpha + inner, -alpha + outer)]
    windows = [(max(a, low), min(b, high)) for a, b in windows]
    windows = [(a, b) for a, b in windows if a < b]
    if not windows:
        return 0.0

    xs = np.array([[x1], [x0], [x1], [x0]])
    ys = np.array([[y1], [y1], [y0], [y0]])
    signs = np.array([1.0, -1.0, -1.0, 1.0])
    candidates = _kinks(model, dist, xs, ys).ravel()
    candidates = candidates[np.isfinite(candidates)]
    rows = []
    for a, b in windows:
        inside = candidates[(candidates > a) & (candidates < b)]
        rows.append(np.concatenate([[a], np.sort(inside), [b]]))
    width = max(r.size for r in rows)
    edges = np.array([np.pad(r, (0, width - r.size), mode="edge") for r in rows])

    def integrand(tau: np.ndarray) -> np.ndarray:
        total = np.zeros_like(tau)
        for sign, x, y in zip(signs, xs[:, 0], ys[:, 0]):
            total += sign * pair_overlap(dist, tau, _upper_limit(model, tau, x, y))
        return total

    span = max(b - a for a, b in windows)
    values, residual = integrate_pieces(integrand, edges, _panel_count(model, span))
    _check_residual(residual, "rectangle mass")
    return max(0.0, math.fsum(values))


def edge_window_mass(
    model: TwoByTwoModel, dist: PotentialDistribution, epsilon: float
) -> float:
    """P{2|c| < E_1 - E_2 < 2|c| + ε} = ∫_{|τ + a - b| < δ} A(τ) dτ, δ² = ε(4|c| + ε)."""
    model.require_coupling()
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    delta = math.sqrt(epsilon * (2.0 * model.gap + epsilon))
    low, high = tau_range(dist)
    a, b = max(-model.offset - delta, low), min(-model.offset + delta, high)
    if a >= b:
        return 0.0
    kinks = _knot_differences(dist)
    inside = np.unique(kinks[(kinks > a) & (kinks < b)])
    edges = np.concatenate([[a], inside, [b]])[None, :]
    values, residual = integrate_pieces(lambda tau: overlap_total(dist, tau), edges, 2)
    _check_residual(residual, "edge window")
    return float(values[0])
