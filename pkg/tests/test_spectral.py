"""Eigendecomposition, interval counts, determinants and first-order response."""

import math

import numpy as np
import pytest

from levelstat.errors import DegenerateSpectrumError, DomainError, SiteError
from levelstat.operators import (
    GraphSpec,
    Hamiltonian,
    PotentialVector,
    assemble_hamiltonian,
    build_hopping,
    sample_potential,
)
from levelstat.spectral import (
    Interval,
    IntervalSet,
    count_in_interval,
    degenerate_mask,
    eigendecompose,
    feynman_hellmann_check,
    has_alpha_distinct_profiles,
    min_gaps,
    occupation_determinant,
    occupation_minor,
    profile_determinant_sum,
    projector_entry,
    simplicity_report,
)


def diagonal(*values):
    return eigendecompose(Hamiltonian(np.diag(np.asarray(values, dtype=float))))


def test_eigendecomposition_is_consistent(unit_uniform, chain6):
    """Ascending eigenvalues, orthonormal vectors and small residuals."""
    potential = sample_potential(unit_uniform, 0, 0, chain6.n_sites)
    hamiltonian = assemble_hamiltonian(build_hopping(chain6), potential, chain6)
    spectrum = eigendecompose(hamiltonian)

    spectrum.check(hamiltonian.matrix)
    assert spectrum.n_sites == 6
    assert np.allclose(spectrum.weights.sum(axis=0), 1.0)
    assert np.allclose(spectrum.weights.sum(axis=1), 1.0)


def test_intervals_are_half_open():
    """[a, b) counts its left endpoint but not its right one."""
    spectrum = diagonal(0.0, 1.0, 2.0)

    assert count_in_interval(spectrum, (0.0, 1.0)) == 1
    assert count_in_interval(spectrum, (0.5, 2.0)) == 1
    assert count_in_interval(spectrum, (0.0, 2.0 + 1e-12)) == 3
    with pytest.raises(DomainError):
        Interval(1.0, 1.0)


def test_interval_set_helpers():
    """Disjointness and repeats are detected."""
    disjoint = IntervalSet.of((0.0, 1.0), (1.0, 2.0))
    overlapping = IntervalSet.of((0.0, 1.0), (0.5, 2.0))
    repeated = IntervalSet.of((0.0, 1.0), (0.0, 1.0))

    assert disjoint.disjoint and not overlapping.disjoint
    assert repeated.has_repeats() and not disjoint.has_repeats()
    assert np.allclose(disjoint.lengths, [1.0, 1.0])


def test_projector_entries_sum_to_one(unit_uniform, chain6):
    """Projectors onto a cover of the spectrum resolve the identity."""
    potential = sample_potential(unit_uniform, 4, 2, chain6.n_sites)
    spectrum = eigendecompose(
        assemble_hamiltonian(build_hopping(chain6), potential, chain6)
    )
    cover = [(-10.0, 0.5), (0.5, 10.0)]

    for site in range(chain6.n_sites):
        total = sum(projector_entry(spectrum, interval, site) for interval in cover)
        assert total == pytest.approx(1.0, abs=1e-12)


def test_occupation_determinant_diagonal():
    """Without hopping the occupation matrix is a permutation of indicators."""
    spectrum = diagonal(0.0, 1.0, 2.0)
    intervals = IntervalSet.of((-0.5, 0.5), (0.5, 1.5))

    assert occupation_determinant(spectrum, intervals, (0, 1)) == pytest.approx(1.0)
    assert occupation_determinant(spectrum, intervals, (1, 0)) == pytest.approx(1.0)
    assert occupation_determinant(spectrum, intervals, (0, 2)) == pytest.approx(0.0)


def test_occupation_determinant_repeated_interval_is_zero():
    """A repeated interval gives two equal rows and an exact zero."""
    spectrum = diagonal(0.0, 1.0)
    intervals = IntervalSet.of((-0.5, 1.5), (-0.5, 1.5))

    assert occupation_determinant(spectrum, intervals, (0, 1)) == 0.0


def test_occupation_determinant_requires_distinct_sites():
    """Repeated sites are refused."""
    spectrum = diagonal(0.0, 1.0)
    with pytest.raises(SiteError):
        occupation_determinant(
            spectrum, IntervalSet.of((-1.0, 0.5), (0.5, 2.0)), (1, 1)
        )


def test_profile_determinant_sum_diagonal():
    """Each site tuple covering the eigenvectors contributes one."""
    spectrum = diagonal(0.0, 1.0, 2.0)

    assert profile_determinant_sum(spectrum, (0, 1), [(0,), (1,)]) == pytest.approx(1.0)
    assert profile_determinant_sum(spectrum, (0, 1), [(0, 1), (0, 1)]) == pytest.approx(2.0)
    assert profile_determinant_sum(spectrum, (0, 1), [(2,), (2,)]) == 0.0
    assert has_alpha_distinct_profiles(spectrum, (0, 1), [(0,), (1,)], 1.0)
    assert not has_alpha_distinct_profiles(spectrum, (0, 1), [(0,), (1,)], 1.1)


def test_occupation_minor_is_below_profile_sum(unit_uniform, chain6):
    """The block-weight determinant never exceeds the profile sum."""
    sets = [(0, 1, 2), (3, 4, 5)]
    for index in range(5):
        potential = sample_potential(unit_uniform, 9, index, chain6.n_sites)
        spectrum = eigendecompose(
            assemble_hamiltonian(build_hopping(chain6), potential, chain6)
        )
        minor = occupation_minor(spectrum, (1, 4), sets)
        total = profile_determinant_sum(spectrum, (1, 4), sets)
        assert minor <= total + 1e-12


def test_profile_sum_rejects_bad_indices():
    """Repeated eigen-indices and a wrong number of sets raise SiteError."""
    spectrum = diagonal(0.0, 1.0, 2.0)
    with pytest.raises(SiteError):
        profile_determinant_sum(spectrum, (1, 1), [(0,), (1,)])
    with pytest.raises(SiteError):
        profile_determinant_sum(spectrum, (0, 1), [(0,)])


def test_simplicity_flags():
    """Exact repeats are degenerate, separated levels are not."""
    assert simplicity_report(diagonal(1.0, 1.0, 2.0)).degenerate
    assert not simplicity_report(diagonal(0.0, 1.0, 2.0)).degenerate

    gaps = min_gaps(np.array([[0.0, 1.0, 3.0], [0.0, 0.5, 0.6]]))
    assert np.allclose(gaps, [1.0, 0.1])
    assert degenerate_mask(np.array([[0.0, 0.0], [0.0, 1.0]])).tolist() == [
        True,
        False,
    ]


def test_feynman_hellmann_on_well_separated_levels(unit_uniform, chain6):
    """∂E_j/∂V_x matches |ψ_j(x)|² whenever the spectrum is well separated."""
    checked = 0
    for index in range(20):
        potential = sample_potential(unit_uniform, 21, index, chain6.n_sites)
        spectrum = eigendecompose(
            assemble_hamiltonian(build_hopping(chain6), potential, chain6)
        )
        if min_gaps(spectrum.eigenvalues)[0] < 0.05:
            continue
        for site, eigenindex in ((0, 0), (2, 3), (5, 5)):
            result = feynman_hellmann_check(chain6, potential, site, eigenindex)
            assert result.agrees(absolute=1e-7)
        checked += 1
    assert checked > 0


def test_feynman_hellmann_refuses_degenerate_level():
    """Two decoupled sites at the same potential are degenerate."""
    graph = GraphSpec.from_edges(2, [])
    flat = PotentialVector(np.array([0.3, 0.3]), 0, 0)
    split = PotentialVector(np.array([0.2, 0.7]), 0, 0)

    with pytest.raises(DegenerateSpectrumError):
        feynman_hellmann_check(graph, flat, 0, 0)
    result = feynman_hellmann_check(graph, split, 0, 0)
    assert result.analytic == pytest.approx(1.0)
    assert result.agrees()


def chain_spectrum(dist, graph, seed, index):
    potential = sample_potential(dist, seed, index, graph.n_sites)
    return eigendecompose(assemble_hamiltonian(build_hopping(graph), potential, graph))


def test_occupation_determinant_at_most_one(unit_uniform, chain6):
    """Disjoint intervals give column sums of at most one, so |det| <= 1."""
    rng = np.random.default_rng(41)
    for index in range(200):
        spectrum = chain_spectrum(unit_uniform, chain6, 41, index)
        cuts = np.sort(rng.uniform(-2.5, 3.5, size=3))
        intervals = IntervalSet.of((cuts[0], cuts[1]), (cuts[1], cuts[2]))
        sites = tuple(int(s) for s in rng.choice(6, size=2, replace=False))

        assert occupation_determinant(spectrum, intervals, sites) <= 1.0 + 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_profile_sum_over_whole_lattice_at_most_factorial(unit_uniform, chain6, n):
    """With every block equal to Λ the profile sum is at most n!."""
    rng = np.random.default_rng(42 + n)
    everything = tuple(range(chain6.n_sites))
    for index in range(40):
        spectrum = chain_spectrum(unit_uniform, chain6, 42, index)
        eigenindices = tuple(int(j) for j in rng.choice(6, size=n, replace=False))
        total = profile_determinant_sum(spectrum, eigenindices, [everything] * n)

        assert total <= math.factorial(n) * (1.0 + 1e-12)


def test_occupancy_grows_with_the_interval(unit_uniform, chain6):
    """I ⊂ J implies Tr P_I <= Tr P_J."""
    rng = np.random.default_rng(43)
    for index in range(200):
        spectrum = chain_spectrum(unit_uniform, chain6, 43, index)
        low, inner_low, inner_high, high = np.sort(rng.uniform(-2.5, 3.5, size=4))

        inner = count_in_interval(spectrum, (inner_low, inner_high))
        outer = count_in_interval(spectrum, (low, high))
        assert inner <= outer


@pytest.mark.slow
def test_feynman_hellmann_on_random_complete_graphs():
    """Twenty random weighted 8-site graphs, every site and eigen-index."""
    rng = np.random.default_rng(44)
    checked = 0
    while checked < 20:
        edges = [
            (x, y, float(rng.normal()))
            for x in range(8)
            for y in range(x + 1, 8)
        ]
        graph = GraphSpec.from_edges(8, edges)
        potential = PotentialVector(rng.uniform(0.0, 1.0, size=8), checked, 44)
        spectrum = eigendecompose(
            assemble_hamiltonian(build_hopping(graph), potential, graph)
        )
        if min_gaps(spectrum.eigenvalues)[0] < 0.3:
            continue
        for site in range(8):
            for eigenindex in range(8):
                result = feynman_hellmann_check(
                    graph, potential, site, eigenindex, step=1e-5
                )
                assert result.agrees(relative=1e-6, absolute=1e-9)
        checked += 1
