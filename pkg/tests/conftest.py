"""Shared fixtures: small graphs and distributions used across the suite."""

import pytest

from levelstat.operators import GraphSpec, PotentialDistribution


@pytest.fixture
def unit_uniform():
    return PotentialDistribution.uniform(0.0, 1.0)


@pytest.fixture
def centred_uniform():
    return PotentialDistribution.uniform(-1.0, 1.0)


@pytest.fixture
def chain6():
    return GraphSpec.chain(6)


@pytest.fixture
def isolated_pair():
    """Two sites and no edges: H = diag(V)."""
    return GraphSpec.from_edges(2, [])


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv("LEVELSTAT_SEED", raising=False)
