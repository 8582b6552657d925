"""Staged experiment runs end to end."""

import textwrap

import pytest

from levelstat.experiments import (
    EXPERIMENTS,
    STAGES,
    ExperimentContext,
    parse_config,
    run,
    run_async,
)


def config(text):
    return parse_config(textwrap.dedent(text), environ={})


WEGNER = """
    experiment: wegner
    graph: {kind: chain, n_sites: 6}
    intervals: [[0.4, 0.6]]
    n_samples: 600
    seed: 2
    chunk_size: 64
    """


@pytest.mark.asyncio
async def test_stages_fill_metadata():
    """PARSE, DO, REVIEW and OUTPUT leave their results in the context."""
    cfg = config(WEGNER)
    experiment = EXPERIMENTS["wegner"](cfg)
    context = ExperimentContext(cfg, threads=1)
    record = await experiment.execute(context)

    assert list(experiment.supported_stages) == list(STAGES)
    assert context.current_stage == "output"
    for key in ("inputs", "results", "summary", "violations", "record"):
        assert key in context.metadata
    assert record is context.metadata["record"]


@pytest.mark.asyncio
async def test_wegner_record():
    """Two reports, one estimates table, no violations."""
    record = await run_async(config(WEGNER), threads=2)

    assert record.experiment == "wegner"
    assert record.seed == 2
    assert [r.quantity for r in record.reports] == [
        "occupancy_probability",
        "mean_trace",
    ]
    assert record.tables[0].name == "estimates"
    assert len(record.tables[0].rows) == 2
    assert record.violations == []
    assert record.summary["bound_satisfied"] is True


def test_records_do_not_depend_on_threads():
    """Everything but the timestamp is identical for 1 and 8 threads."""
    cfg = config(WEGNER)
    assert run(cfg, threads=1).body() == run(cfg, threads=8).body()


def test_experiment_refuses_foreign_config():
    """A runner only accepts configs naming its own experiment."""
    with pytest.raises(ValueError):
        EXPERIMENTS["minami"](config(WEGNER))


def test_joint_intervals_records_conjecture_without_failing():
    """A violated conjectured bound is recorded but is not a violation."""
    record = run(
        config(
            """
            experiment: joint-intervals
            graph: {kind: chain, n_sites: 6}
            intervals: [[0.0, 0.5], [1.0, 1.5]]
            constant: 1.0e-6
            n_samples: 500
            seed: 1
            """
        ),
        threads=1,
    )
    assert record.summary["conjecture_violated"] is True
    assert record.violations == []
    assert record.reports[0].bound_kind == "conjectured"


def test_spectral_averaging_reports_both_means():
    """The full and single-occupancy determinant means are both reported."""
    record = run(
        config(
            """
            experiment: spectral-averaging
            graph: {kind: chain, n_sites: 5}
            intervals: [[-1.0, 0.0], [1.0, 2.0]]
            sites: [0, 4]
            n_samples: 400
            """
        ),
        threads=1,
    )
    quantities = [r.quantity for r in record.reports]
    assert quantities == [
        "occupation_determinant_mean",
        "single_occupancy_determinant_mean",
    ]
    assert record.violations == []


def test_multiplicity_explicit_problem():
    """The 2x2 coupled problem has two roots and a consistent factorization."""
    record = run(
        config(
            """
            experiment: multiplicity
            graph:
              kind: edges
              n_sites: 2
              edges: [[0, 1, 0.5]]
            multiplicity:
              free_sites: [0, 1]
              targets: [1.0, -1.0]
              n_starts: 300
            """
        ),
        threads=1,
    )
    instances = record.table("instances")
    solutions = record.table("solutions")

    assert instances.rows[0][1] == 2
    assert instances.rows[0][2] == 2
    assert len(solutions.rows) == 2
    assert solutions.header[2:4] == ("v_0", "v_1")
    assert record.summary["max_count"] == 2
    assert record.violations == []


def test_multiplicity_random_problems():
    """Sampled problems stay within n! and report their known roots."""
    record = run(
        config(
            """
            experiment: multiplicity
            graph: {kind: chain, n_sites: 3}
            multiplicity:
              free_sites: [0, 2]
              random_problems: 2
              target_indices: [0, 2]
              n_starts: 400
            seed: 5
            """
        ),
        threads=1,
    )
    summary = record.summary

    assert summary["problems"] == 2
    assert summary["max_count"] <= 2
    assert summary["known_roots_total"] == 2 - summary["skipped"]
    assert len(record.table("instances").rows) == 2


def test_simplicity_experiment():
    """det M is positive on every sample; degree probes stay below 2(|Λ| - 1)."""
    record = run(
        config(
            """
            experiment: simplicity
            graph: {kind: chain, n_sites: 4}
            n_samples: 200
            simplicity: {degree_templates: 2, degree_site: 0}
            """
        ),
        threads=2,
    )
    assert record.violations == []
    assert record.summary["nonpositive_det"] == 0
    assert len(record.table("samples").rows) == 200
    for row in record.table("degrees").rows:
        assert row[1] <= row[2] == 6


def test_gap_rounding_experiment():
    """One spacing row per ε and a fitted exponent in the summary."""
    record = run(
        config(
            """
            experiment: gap-rounding
            graph: {kind: chain, n_sites: 4}
            n_samples: 1000
            gap_rounding: {epsilons: [0.3, 0.1, 0.03]}
            """
        ),
        threads=1,
    )
    assert len(record.table("spacing").rows) == 3
    assert "exponent" in record.summary


@pytest.mark.slow
def test_two_by_two_experiment():
    """Density, scaling and bound tables with the gap invariant intact."""
    record = run(
        config(
            """
            experiment: two-by-two
            n_samples: 20000
            two_by_two:
              c: 0.5
              bins: 6
              epsilons: [1.0e-2, 1.0e-3, 1.0e-4]
              widths: [1.0e-1, 1.0e-2, 1.0e-3]
            """
        ),
        threads=2,
    )
    assert [t.name for t in record.tables] == ["density", "scaling", "bounds"]
    assert len(record.table("density").rows) == 36
    assert record.violations == []
    assert record.summary["gap_violations"] == 0
    assert record.summary["total_mass"] == pytest.approx(1.0, abs=1e-6)
    assert record.summary["edge_exponent"] == pytest.approx(0.5, abs=0.05)
    assert record.summary["area_ratio_growth"] > 1.0
