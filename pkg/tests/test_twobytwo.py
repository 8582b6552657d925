"""Closed forms, quadrature and probes of the two-site model."""

import math

import numpy as np
import pytest

from levelstat.errors import DomainError
from levelstat.operators import PotentialDistribution
from levelstat.statistics import fit_loglog_slope
from levelstat.twobytwo import (
    TwoByTwoModel,
    corner_cdf,
    edge_window_mass,
    eigenvalues_2x2,
    invert_to_potentials,
    jacobian_2x2,
    joint_density,
    mc_vs_analytic,
    modified_bound_check,
    rectangle_mass,
    singular_scaling_probe,
    straddling_intervals,
)


def test_closed_form_eigenvalues_match_eigvalsh():
    """E_1 >= E_2 agree with a dense solver, complex coupling included."""
    model = TwoByTwoModel(a=0.3, b=-0.2, c=0.4 + 0.3j)
    for omega1, omega2 in ((0.1, 0.9), (0.5, 0.5), (-1.0, 2.0)):
        e1, e2 = eigenvalues_2x2(model, omega1, omega2)
        dense = np.linalg.eigvalsh(model.matrix(omega1, omega2))
        assert np.allclose([e2, e1], dense, atol=1e-14)
        assert e1 - e2 >= model.gap - 1e-14


def test_inversion_recovers_both_branches():
    """Both preimages reproduce the requested eigenvalue pair."""
    model = TwoByTwoModel(a=0.1, b=0.4, c=0.5)
    solutions = invert_to_potentials(model, 1.2, -0.6)

    assert len(solutions) == 2
    for omega1, omega2 in solutions:
        e1, e2 = eigenvalues_2x2(model, omega1, omega2)
        assert e1 == pytest.approx(1.2, abs=1e-12)
        assert e2 == pytest.approx(-0.6, abs=1e-12)


def test_inversion_at_and_below_the_gap():
    """The saturated gap has one preimage; a smaller spacing has none."""
    model = TwoByTwoModel(c=0.5)
    assert len(invert_to_potentials(model, 0.5, -0.5)) == 1
    with pytest.raises(DomainError):
        invert_to_potentials(model, 0.4, -0.4)


def test_jacobian_matches_finite_differences():
    """|det ∂E/∂ω| from the closed form equals a central difference."""
    model = TwoByTwoModel(a=0.0, b=0.3, c=0.5)
    omega = np.array([0.7, 0.1])
    step = 1e-6
    columns = []
    for k in range(2):
        offset = np.zeros(2)
        offset[k] = step
        upper = np.array(eigenvalues_2x2(model, *(omega + offset)))
        lower = np.array(eigenvalues_2x2(model, *(omega - offset)))
        columns.append((upper - lower) / (2 * step))
    numeric = abs(np.linalg.det(np.stack(columns, axis=1)))
    e1, e2 = eigenvalues_2x2(model, *omega)

    assert jacobian_2x2(model, e1, e2) == pytest.approx(numeric, rel=1e-6)
    with pytest.raises(DomainError):
        jacobian_2x2(model, 0.5, 0.0)


def test_joint_density_closed_value(centred_uniform):
    """At E = (1, -1), c = 1/2 both branches give 1/4 and the Jacobian √3/2."""
    model = TwoByTwoModel(c=0.5)
    assert joint_density(model, centred_uniform, 1.0, -1.0) == pytest.approx(
        1.0 / math.sqrt(3.0), rel=1e-12
    )
    assert joint_density(model, centred_uniform, 0.4, 0.0) == 0.0


def test_joint_density_unreachable_pair(unit_uniform):
    """With a - b = 5 the spacing 2 is above the gap yet never reached."""
    model = TwoByTwoModel(a=5.0, b=0.0, c=0.5)
    assert joint_density(model, unit_uniform, 1.0, -1.0) == 0.0


def test_joint_density_requires_coupling(unit_uniform):
    """c = 0 has no density."""
    with pytest.raises(DomainError):
        joint_density(TwoByTwoModel(c=0.0), unit_uniform, 1.0, 0.0)


def test_corner_cdf_limits(unit_uniform):
    """The CDF is one above the range and zero below it."""
    model = TwoByTwoModel(a=0.2, b=-0.1, c=0.5)
    low, high = model.eigenvalue_range(unit_uniform)

    top = float(corner_cdf(model, unit_uniform, high + 1.0, high + 1.0))
    bottom = float(corner_cdf(model, unit_uniform, low - 1.0, high))
    assert top == pytest.approx(1.0, abs=1e-9)
    assert bottom == pytest.approx(0.0, abs=1e-12)


def test_rectangle_mass_matches_density_integral(unit_uniform):
    """A rectangle away from the gap edge and the support boundary integrates
    the closed-form density."""
    model = TwoByTwoModel(c=0.5)
    first, second = (0.85, 0.9), (-0.25, -0.2)
    mass = rectangle_mass(model, unit_uniform, first, second)

    nodes, weights = np.polynomial.legendre.leggauss(200)
    x = 0.5 * (first[0] + first[1]) + 0.5 * (first[1] - first[0]) * nodes
    y = 0.5 * (second[0] + second[1]) + 0.5 * (second[1] - second[0]) * nodes
    density = joint_density(model, unit_uniform, x[:, None], y[None, :])
    area = 0.25 * (first[1] - first[0]) * (second[1] - second[0])
    reference = area * weights @ density @ weights

    assert mass == pytest.approx(reference, rel=1e-5)


def test_edge_window_scaling_exponent(unit_uniform):
    """The mass above the gap edge scales like ε^(1/2)."""
    model = TwoByTwoModel(c=0.5)
    table = singular_scaling_probe(model, unit_uniform, [1e-3, 1e-2, 1e-4, 1e-5])

    assert table.epsilons == (1e-2, 1e-3, 1e-4, 1e-5)
    assert all(m > 0 for m in table.masses)
    assert table.exponent == pytest.approx(0.5, abs=0.05)
    with pytest.raises(ValueError):
        edge_window_mass(model, unit_uniform, 0.0)


def test_straddling_intervals_default_separation():
    """The lower interval ends 2|c| below the upper one's start."""
    model = TwoByTwoModel(c=0.25)
    first, second = straddling_intervals(model, 1.0, 0.1)
    assert first == (1.0, 1.1)
    assert second[1] == pytest.approx(0.5)
    assert second[1] - second[0] == pytest.approx(0.1)


def test_modified_bound_rows(unit_uniform):
    """|I|² under-predicts at the gap edge; max(|I|, √|I|)² does not."""
    model = TwoByTwoModel(c=0.5)
    rows = modified_bound_check(model, unit_uniform, [1e-4, 1e-1, 1e-2, 1e-3])

    assert [row.width for row in rows] == [1e-1, 1e-2, 1e-3, 1e-4]
    assert all(row.probability > 0 for row in rows)
    assert rows[-1].ratio_area >= 10 * rows[0].ratio_area
    assert max(row.ratio_modified for row in rows) <= 2 * rows[0].ratio_modified


def test_mc_vs_analytic_grid(unit_uniform):
    """Histogram and quadrature agree to sampling noise."""
    model = TwoByTwoModel(a=0.1, b=0.0, c=0.5)
    grid = mc_vs_analytic(model, unit_uniform, 8, 20_000, 5, threads=2)

    assert grid.total_mass == pytest.approx(1.0, abs=1e-6)
    assert grid.mc_counts.sum() == 20_000
    assert grid.gap_violations == 0
    assert grid.trace_error < 1e-12
    assert grid.l1_distance < 2 * grid.l1_noise_floor + 1e-3
    assert len(list(grid.rows())) == 64


def test_mc_vs_analytic_is_thread_count_invariant(unit_uniform):
    """Counts do not depend on the worker count."""
    model = TwoByTwoModel(c=0.5)
    serial = mc_vs_analytic(model, unit_uniform, 4, 10_000, 1, threads=1)
    parallel = mc_vs_analytic(model, unit_uniform, 4, 10_000, 1, threads=8)
    assert np.array_equal(serial.mc_counts, parallel.mc_counts)


def test_mc_vs_analytic_needs_enough_samples(unit_uniform):
    """Below ten thousand samples the comparison is refused."""
    with pytest.raises(ValueError):
        mc_vs_analytic(TwoByTwoModel(c=0.5), unit_uniform, 4, 9_999, 0)


def test_triangular_grid_total_mass():
    """The corner CDF accounts for all mass under a triangular law."""
    dist = PotentialDistribution.triangular(-1.0, 1.0)
    model = TwoByTwoModel(a=0.0, b=0.5, c=0.3)
    low, high = model.eigenvalue_range(dist)
    total = float(corner_cdf(model, dist, high, high))
    assert total == pytest.approx(1.0, abs=1e-7)


def test_gap_edge_probability_scales_like_three_halves(unit_uniform):
    """At the gap edge the straddling probability decays like |I|^(3/2)."""
    model = TwoByTwoModel(c=0.5)
    rows = modified_bound_check(model, unit_uniform, [1e-2, 1e-3, 3e-4, 1e-4])
    slope = fit_loglog_slope(
        [row.width for row in rows[1:]], [row.probability for row in rows[1:]]
    )

    assert slope == pytest.approx(1.5, abs=0.05)


@pytest.mark.slow
@pytest.mark.parametrize("bins, n_samples", [(20, 1_000_000), (100, 1_000_000)])
def test_density_grid_at_acceptance_scale(centred_uniform, bins, n_samples):
    """a = b = 0, c = 1/2, uniform(-1, 1): histogram within noise of the density."""
    model = TwoByTwoModel(a=0.0, b=0.0, c=0.5)
    grid = mc_vs_analytic(model, centred_uniform, bins, n_samples, 7, threads=4)

    assert grid.gap_violations == 0
    assert grid.total_mass == pytest.approx(1.0, abs=1e-6)
    assert grid.l1_distance - grid.l1_noise_floor <= 0.02
    if bins == 20:
        assert grid.l1_distance <= 0.02
