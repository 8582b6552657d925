"""One experiment class per configurable run, and the ``run`` entry points."""

from __future__ import annotations

import asyncio
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple, Type

import numpy as np

from ..algebraic.antisymmetric import det_M_batch, degree_probe
from ..algebraic.multiplicity import (
    JacobianCheck,
    MultiplicityProblem,
    SolutionSet,
    jacobian_condition,
)
from ..algebraic.newton import NewtonSearch, solve_multilinear_system
from ..errors import DegenerateSpectrumError, DegenerateSystemError
from ..operators.graph import GraphSpec, build_hopping
from ..operators.hamiltonian import assemble_batch
from ..operators.potentials import PotentialDistribution, sample_potentials
from ..spectral.intervals import IntervalSet
from ..statistics.bounds import PROVEN
from ..statistics.estimators import (
    EstimatorReport,
    ExperimentSpec,
    estimate_joint_intervals,
    estimate_minami,
    estimate_n_level,
    estimate_profile_event,
    estimate_single_occupancy_determinant,
    estimate_spectral_averaging,
    estimate_wegner,
)
from ..statistics.exploratory import GapRoundingTable, gap_rounding_probe
from ..statistics.sampling import SampleRunner, SpectralBatch
from ..twobytwo.probes import (
    mc_vs_analytic,
    modified_bound_check,
    singular_scaling_probe,
)
from .base import Experiment, ExperimentContext
from .config import GapRoundingConfig, MultiplicityConfig, RunConfig, TwoByTwoConfig
from .records import ResultRecord, ResultTable, estimator_table

KNOWN_ROOT_TOLERANCE = 1e-6


class EstimatorExperiment(Experiment):
    """Monte Carlo estimators; every report is checked against its bound."""

    def prepare(self, config: RunConfig) -> ExperimentSpec:
        return ExperimentSpec(
            graph=config.graph.build(),
            dist=config.distribution.build(),
            intervals=IntervalSet(tuple(config.intervals)),
            n_samples=config.n_samples,
            seed=config.seed,
            sets=None if config.sets is None else tuple(map(tuple, config.sets)),
            alpha=config.alpha,
            sites=None if config.sites is None else tuple(config.sites),
            confidence_level=config.confidence_level,
        )

    def compute(
        self, spec: ExperimentSpec, threads: Optional[int]
    ) -> List[EstimatorReport]:
        return list(self.estimate(spec, threads, self.config.chunk_size))

    def estimate(
        self, spec: ExperimentSpec, threads: Optional[int], chunk_size: int
    ) -> Tuple[EstimatorReport, ...]:
        raise NotImplementedError

    def review(
        self, reports: List[EstimatorReport], summary: Dict[str, Any]
    ) -> List[str]:
        summary["bound_satisfied"] = all(r.bound_satisfied for r in reports)
        return [r.quantity for r in reports if r.bound_kind == PROVEN and r.violated]

    def tables(self, reports: List[EstimatorReport]) -> List[ResultTable]:
        return [estimator_table(self.name, reports)]

    def reports(self, reports: List[EstimatorReport]) -> List[EstimatorReport]:
        return reports


class WegnerExperiment(EstimatorExperiment):
    name = "wegner"

    def estimate(self, spec, threads, chunk_size):
        return estimate_wegner(spec, threads, chunk_size)


class MinamiExperiment(EstimatorExperiment):
    name = "minami"

    def estimate(self, spec, threads, chunk_size):
        return estimate_minami(spec, threads, chunk_size)


class NLevelExperiment(EstimatorExperiment):
    name = "n-level"

    def estimate(self, spec, threads, chunk_size):
        return (estimate_n_level(spec, self.config.n, threads, chunk_size),)


class JointIntervalsExperiment(EstimatorExperiment):
    """The conjectured product bound fails in general; violations are only recorded."""

    name = "joint-intervals"

    def estimate(self, spec, threads, chunk_size):
        constant = self.config.constant
        return (estimate_joint_intervals(spec, threads, chunk_size, constant),)

    def review(self, reports, summary):
        violations = super().review(reports, summary)
        summary["conjecture_violated"] = any(r.violated for r in reports)
        return violations


class SpectralAveragingExperiment(EstimatorExperiment):
    name = "spectral-averaging"

    def estimate(self, spec, threads, chunk_size):
        return (
            estimate_spectral_averaging(spec, threads, chunk_size),
            estimate_single_occupancy_determinant(spec, threads, chunk_size),
        )


class ProfileEventExperiment(EstimatorExperiment):
    name = "profile-event"

    def estimate(self, spec, threads, chunk_size):
        return (estimate_profile_event(spec, threads, chunk_size),)


class TwoByTwoExperiment(Experiment):
    """Density grid against Monte Carlo, gap-edge scaling and straddling intervals."""

    name = "two-by-two"

    def prepare(self, config: RunConfig):
        block = config.two_by_two or TwoByTwoConfig()
        return block.build(), config.distribution.build(), block

    def compute(self, inputs, threads):
        model, dist, block = inputs
        config = self.config
        return {
            "grid": mc_vs_analytic(
                model, dist, block.bins, config.n_samples, config.seed, threads
            ),
            "scaling": singular_scaling_probe(model, dist, block.epsilons),
            "bounds": modified_bound_check(
                model, dist, block.widths, block.start, block.separation
            ),
        }

    def review(self, results, summary):
        grid, scaling, bounds = results["grid"], results["scaling"], results["bounds"]
        summary.update(
            l1_distance=grid.l1_distance,
            l1_noise_floor=grid.l1_noise_floor,
            l1_excess=grid.l1_distance - grid.l1_noise_floor,
            total_mass=grid.total_mass,
            gap_violations=grid.gap_violations,
            trace_error=grid.trace_error,
            edge_exponent=scaling.exponent,
            area_ratio_growth=bounds[-1].ratio_area / bounds[0].ratio_area,
            modified_ratio_spread=max(r.ratio_modified for r in bounds)
            / bounds[0].ratio_modified,
        )
        return ["gap_invariant"] if grid.gap_violations else []

    def tables(self, results):
        grid, scaling, bounds = results["grid"], results["scaling"], results["bounds"]
        return [
            ResultTable(
                "density",
                ("e1_low", "e1_high", "e2_low", "e2_high", "analytic_mass", "mc_count"),
                tuple(grid.rows()),
            ),
            ResultTable(
                "scaling",
                ("epsilon", "window_mass"),
                tuple(zip(scaling.epsilons, scaling.masses)),
            ),
            ResultTable(
                "bounds",
                ("width", "probability", "ratio_area", "ratio_modified"),
                tuple(
                    (r.width, r.probability, r.ratio_area, r.ratio_modified)
                    for r in bounds
                ),
            ),
        ]


@dataclass(frozen=True)
class MultiplicityCase:
    index: int
    problem: Optional[MultiplicityProblem]
    known_root: Optional[np.ndarray] = None
    skipped: str = ""


@dataclass(frozen=True)
class MultiplicityOutcome:
    case: MultiplicityCase
    solutions: Optional[SolutionSet]
    checks: Tuple[Optional[JacobianCheck], ...] = ()

    @property
    def known_root_found(self) -> Optional[bool]:
        if self.case.known_root is None or self.solutions is None:
            return None
        root = self.case.known_root
        limit = KNOWN_ROOT_TOLERANCE * (1.0 + float(np.max(np.abs(root))))
        return bool(
            any(np.max(np.abs(s - root)) <= limit for s in self.solutions.solutions)
        )

    @property
    def factorization_ok(self) -> bool:
        return all(check is not None and check.agrees for check in self.checks)


class MultiplicityExperiment(Experiment):
    """Counts real isolated roots of P_{E_j}(V_Σ) = 0 against n!."""

    name = "multiplicity"

    def prepare(self, config: RunConfig):
        graph = config.graph.build()
        dist = config.distribution.build()
        block: MultiplicityConfig = config.multiplicity
        search = NewtonSearch(
            n_starts=block.n_starts,
            box=block.box,
            newton_tol=block.newton_tol,
            dedup_tol=block.dedup_tol,
            seed=config.seed,
        )
        return graph, dist, block, search, list(self._cases(graph, dist, block))

    def _cases(self, graph: GraphSpec, dist: PotentialDistribution, block):
        n_sites = graph.n_sites
        onsite = np.zeros(n_sites)
        if block.onsite is not None:
            onsite = np.asarray(block.onsite, dtype=float)
        if block.random_problems == 0:
            frozen = block.frozen_potential or [0.0] * n_sites
            problem = MultiplicityProblem(
                graph,
                tuple(block.free_sites),
                tuple(block.targets),
                np.asarray(frozen),
                tuple(onsite),
            )
            yield MultiplicityCase(0, problem)
            return
        hopping = build_hopping(graph) + np.diag(onsite)
        indices = block.target_indices or list(range(len(block.free_sites)))
        for index in range(block.random_problems):
            omega = sample_potentials(dist, self.config.seed, index, 1, n_sites)
            eigenvalues = np.linalg.eigvalsh(assemble_batch(hopping, omega)[0])
            targets = tuple(float(eigenvalues[i]) for i in indices)
            try:
                problem = MultiplicityProblem(
                    graph, tuple(block.free_sites), targets, omega[0], tuple(onsite)
                )
                problem.check_targets()
            except (DegenerateSystemError, ValueError) as e:
                self.logger.warning(f"Random problem {index} skipped: {e}")
                yield MultiplicityCase(index, None, skipped=str(e))
                continue
            yield MultiplicityCase(index, problem, omega[0][list(problem.free_sites)])

    def compute(self, inputs, threads):
        graph, dist, block, search, cases = inputs
        outcomes = []
        for case in cases:
            if case.problem is None:
                outcomes.append(MultiplicityOutcome(case, None))
                continue
            solutions = solve_multilinear_system(
                case.problem, search, support=dist.support, threads=threads
            )
            checks = []
            for row in solutions.solutions:
                try:
                    checks.append(jacobian_condition(case.problem, row))
                except DegenerateSpectrumError as e:
                    self.logger.warning(f"Problem {case.index}: {e}")
                    checks.append(None)
            outcomes.append(MultiplicityOutcome(case, solutions, tuple(checks)))
        return outcomes

    def review(self, outcomes: List[MultiplicityOutcome], summary):
        solved = [o for o in outcomes if o.solutions is not None]
        n = len(self.config.multiplicity.free_sites)
        known = [o.known_root_found for o in solved if o.known_root_found is not None]
        failures = sum(not o.factorization_ok for o in solved)
        summary.update(
            problems=len(outcomes),
            skipped=len(outcomes) - len(solved),
            bound=math.factorial(n),
            max_count=max((o.solutions.count for o in solved), default=0),
            total_solutions=sum(o.solutions.count for o in solved),
            known_roots_recovered=sum(known),
            known_roots_total=len(known),
            factorization_failures=failures,
        )
        return ["jacobian_factorization"] if failures else []

    def tables(self, outcomes: List[MultiplicityOutcome]):
        n = len(self.config.multiplicity.free_sites)
        bound = math.factorial(n)
        instances = []
        solutions = []
        for outcome in outcomes:
            count = outcome.solutions.count if outcome.solutions is not None else 0
            instances.append(
                (
                    outcome.case.index,
                    count,
                    bound,
                    outcome.known_root_found,
                    outcome.factorization_ok if outcome.solutions is not None else None,
                    outcome.case.skipped,
                )
            )
            if outcome.solutions is None:
                continue
            pairs = zip(outcome.solutions.solutions, outcome.checks)
            for k, (row, check) in enumerate(pairs):
                values = (math.nan,) * 4 + (False,) if check is None else tuple(check)
                solutions.append((outcome.case.index, k, *row.tolist(), *values))
        return [
            ResultTable(
                "instances",
                ("instance", "n_solutions", "bound", "known_root_found",
                 "factorization_ok", "skipped"),
                tuple(instances),
            ),
            ResultTable(
                "solutions",
                ("instance", "solution")
                + tuple(f"v_{k}" for k in range(n))
                + ("jacobian_det", "factored_det", "finite_difference_det",
                   "profile_determinant", "agrees"),
                tuple(solutions),
            ),
        ]


class SimplicityExperiment(Experiment):
    """det M > 0 on every sampled realization, plus optional degree probes."""

    name = "simplicity"

    def prepare(self, config: RunConfig):
        return config.graph.build(), config.distribution.build()

    def compute(self, inputs, threads):
        graph, dist = inputs
        config = self.config
        hopping = build_hopping(graph)
        runner = SampleRunner(
            dist,
            graph.n_sites,
            config.seed,
            config.n_samples,
            threads=threads,
            chunk_size=config.chunk_size,
        )

        def statistic(batch: SpectralBatch) -> np.ndarray:
            matrices = assemble_batch(hopping, batch.potentials)
            det, product, agrees = det_M_batch(matrices)
            return np.stack([det, product, agrees.astype(float)], axis=1)

        samples = runner.map(statistic, vectors=False)
        block = config.simplicity
        degrees = []
        if block is not None and block.degree_templates:
            templates = sample_potentials(
                dist,
                config.seed,
                config.n_samples,
                block.degree_templates,
                graph.n_sites,
            )
            for matrix in assemble_batch(hopping, templates):
                degrees.append(degree_probe(matrix, block.degree_site))
        return samples, degrees

    def review(self, results, summary):
        samples, degrees = results
        nonpositive = int(np.count_nonzero(samples[:, 0] <= 0.0))
        disagreements = int(np.count_nonzero(samples[:, 2] == 0.0))
        if disagreements:
            self.logger.warning(
                f"{disagreements} samples where det M and the spacing product differ"
            )
        summary.update(
            nonpositive_det=nonpositive,
            cross_check_disagreements=disagreements,
            min_det=float(np.min(samples[:, 0])),
        )
        if degrees:
            summary.update(
                max_fitted_degree=max(d.degree for d in degrees),
                exceeds_stated_bound=sum(d.exceeds_stated_bound for d in degrees),
            )
        return ["simple_spectrum"] if nonpositive else []

    def tables(self, results):
        samples, degrees = results
        tables = [
            ResultTable(
                "samples",
                ("sample", "det_m", "spacing_product", "agrees"),
                tuple(
                    (index, float(det), float(product), bool(agrees))
                    for index, (det, product, agrees) in enumerate(samples)
                ),
            )
        ]
        if degrees:
            tables.append(
                ResultTable(
                    "degrees",
                    ("template", "degree", "max_degree", "stated_bound",
                     "exceeds_stated_bound"),
                    tuple(
                        (index, d.degree, d.max_degree, d.stated_bound,
                         d.exceeds_stated_bound)
                        for index, d in enumerate(degrees)
                    ),
                )
            )
        return tables


class GapRoundingExperiment(Experiment):
    name = "gap-rounding"

    def prepare(self, config: RunConfig):
        epsilons = (config.gap_rounding or GapRoundingConfig()).epsilons
        return config.graph.build(), config.distribution.build(), epsilons

    def compute(self, inputs, threads) -> GapRoundingTable:
        graph, dist, epsilons = inputs
        config = self.config
        return gap_rounding_probe(
            graph,
            dist,
            epsilons,
            config.n_samples,
            config.seed,
            threads,
            config.chunk_size,
        )

    def review(self, table: GapRoundingTable, summary):
        summary["exponent"] = table.exponent
        return []

    def tables(self, table: GapRoundingTable):
        return [
            ResultTable(
                "spacing",
                ("epsilon", "probability", "std_error"),
                tuple((r.epsilon, r.probability, r.std_error) for r in table.rows),
            )
        ]


EXPERIMENTS: Dict[str, Type[Experiment]] = {
    cls.name: cls
    for cls in (
        WegnerExperiment,
        MinamiExperiment,
        NLevelExperiment,
        JointIntervalsExperiment,
        SpectralAveragingExperiment,
        ProfileEventExperiment,
        TwoByTwoExperiment,
        MultiplicityExperiment,
        SimplicityExperiment,
        GapRoundingExperiment,
    )
}


async def run_async(config: RunConfig, threads: Optional[int] = None) -> ResultRecord:
    """Run one configured experiment through its PARSE, DO, REVIEW and OUTPUT stages.

    Args:
        config: Validated run configuration; its ``experiment`` picks the runner
        threads: Worker threads, overriding ``config.threads`` when given

    Returns:
        The result record with reports, tables, summary and violations
    """
    experiment = EXPERIMENTS[config.experiment](config)
    threads = threads if threads is not None else config.threads
    context = ExperimentContext(config, threads)
    return await experiment.execute(context)


def run(config: RunConfig, threads: Optional[int] = None) -> ResultRecord:
    """Run one configured experiment to completion.

    Blocking wrapper around ``run_async`` for scripts and the command line.

    Args:
        config: Validated run configuration
        threads: Worker threads; the record does not depend on this value

    Returns:
        The finished result record

    Raises:
        BoundViolation: The run contradicted a proven statement outright
        LevelStatError: A numerical step failed
    """
    return asyncio.run(run_async(config, threads))
