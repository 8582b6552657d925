"""Run configuration: YAML text in, validated :class:`RunConfig` out.

Field problems are collected with their paths (``sites[2]``,
``two_by_two.c``) and raised together as one :class:`ConfigError`.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any, List, Literal, Mapping, Optional, Sequence, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ConfigError, FieldError, LevelStatError
from ..operators.graph import GraphSpec
from ..operators.potentials import MAX_SEED, PotentialDistribution
from ..statistics.sampling import DEFAULT_CHUNK_SIZE
from ..twobytwo.model import TwoByTwoModel
from .environment import EnvironmentSubstitution

logger = logging.getLogger(__name__)

SEED_VARIABLE = "LEVELSTAT_SEED"

ExperimentName = Literal[
    "wegner",
    "minami",
    "n-level",
    "joint-intervals",
    "spectral-averaging",
    "profile-event",
    "two-by-two",
    "multiplicity",
    "simplicity",
    "gap-rounding",
]

EXPERIMENT_NAMES: Tuple[str, ...] = ExperimentName.__args__

INTERVAL_EXPERIMENTS = {
    "wegner",
    "minami",
    "n-level",
    "joint-intervals",
    "spectral-averaging",
    "profile-event",
}
GRAPH_EXPERIMENTS = INTERVAL_EXPERIMENTS | {
    "multiplicity",
    "simplicity",
    "gap-rounding",
}


class GraphConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["chain", "torus", "edges"] = "chain"
    n_sites: Optional[int] = Field(default=None, ge=1)
    hopping: float = 1.0
    periodic: bool = False
    shape: Optional[Tuple[int, int]] = None
    edges: Optional[List[Tuple[int, int, float]]] = None

    def build(self) -> GraphSpec:
        if self.kind == "chain":
            return GraphSpec.chain(self.n_sites, self.hopping, self.periodic)
        if self.kind == "torus":
            return GraphSpec.torus(self.shape[0], self.shape[1], self.hopping)
        return GraphSpec.from_edges(self.n_sites, self.edges or [])

    def problems(self) -> List[FieldError]:
        if self.kind == "torus":
            if self.shape is None:
                return [FieldError("graph.shape", "required for a torus")]
            return []
        if self.n_sites is None:
            return [FieldError("graph.n_sites", f"required for a {self.kind} graph")]
        return []


class DistributionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["uniform", "triangular", "table"] = "uniform"
    low: float = 0.0
    high: float = 1.0
    edges: Optional[List[float]] = None
    masses: Optional[List[float]] = None

    def build(self) -> PotentialDistribution:
        if self.kind == "uniform":
            return PotentialDistribution.uniform(self.low, self.high)
        if self.kind == "triangular":
            return PotentialDistribution.triangular(self.low, self.high)
        return PotentialDistribution.table(self.edges or [], self.masses or [])


class TwoByTwoConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: float = 0.0
    b: float = 0.0
    c: float = 0.5
    c_imag: float = 0.0
    bins: int = Field(default=100, ge=1, le=1000)
    epsilons: List[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4])
    widths: List[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4])
    start: Optional[float] = None
    separation: Optional[float] = None

    def build(self) -> TwoByTwoModel:
        c = complex(self.c, self.c_imag) if self.c_imag else self.c
        return TwoByTwoModel(self.a, self.b, c)


class MultiplicityConfig(BaseModel):
    """One explicit problem, or ``random_problems`` problems drawn from the sampler.

    A random problem freezes a sampled potential outside ``free_sites`` and
    takes its targets from the spectrum of that sample at ``target_indices``,
    so the sampled V_Σ is a known root.
    """

    model_config = ConfigDict(extra="forbid")

    free_sites: List[int]
    targets: Optional[List[float]] = None
    frozen_potential: Optional[List[float]] = None
    onsite: Optional[List[float]] = None
    random_problems: int = Field(default=0, ge=0)
    target_indices: Optional[List[int]] = None
    n_starts: Optional[int] = Field(default=None, ge=1)
    box: Optional[Tuple[float, float]] = None
    newton_tol: float = Field(default=1e-12, gt=0)
    dedup_tol: float = Field(default=1e-8, gt=0)


class SimplicityConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degree_templates: int = Field(default=0, ge=0)
    degree_site: int = Field(default=0, ge=0)


class GapRoundingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    epsilons: List[float] = Field(
        default_factory=lambda: [1e-1, 3e-2, 1e-2, 3e-3, 1e-3], min_length=1
    )


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = "results"
    stem: Optional[str] = None
    formats: List[Literal["csv", "json"]] = Field(
        default_factory=lambda: ["csv", "json"]
    )


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentName
    graph: Optional[GraphConfig] = None
    distribution: DistributionConfig = Field(default_factory=DistributionConfig)
    intervals: List[Tuple[float, float]] = Field(default_factory=list)
    sets: Optional[List[List[int]]] = None
    alpha: Optional[float] = Field(default=None, gt=0)
    sites: Optional[List[int]] = None
    n: Optional[int] = Field(default=None, ge=1)
    constant: float = Field(default=1.0, gt=0)
    n_samples: int = Field(default=10_000, ge=1)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    confidence_level: float = Field(default=0.99, gt=0.0, lt=1.0)
    threads: Optional[int] = Field(default=None, ge=1)
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)
    two_by_two: Optional[TwoByTwoConfig] = None
    multiplicity: Optional[MultiplicityConfig] = None
    simplicity: Optional[SimplicityConfig] = None
    gap_rounding: Optional[GapRoundingConfig] = None
    output: OutputConfig = Field(default_factory=OutputConfig)

    @property
    def n_sites(self) -> Optional[int]:
        if self.graph is None:
            return None
        if self.graph.kind == "torus" and self.graph.shape:
            return self.graph.shape[0] * self.graph.shape[1]
        return self.graph.n_sites

    def canonical_json(self) -> str:
        """Sorted-key JSON of everything that can change results."""
        body = self.model_dump(mode="json", exclude={"output", "threads"})
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def with_seed(self, seed: int) -> "RunConfig":
        return self.model_copy(update={"seed": int(seed)})


def format_location(location: Sequence[Any]) -> str:
    path = ""
    for part in location:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path or "<document>"


def _site_problems(
    values: Sequence[int], n_sites: Optional[int], path: str, distinct: bool = True
) -> List[FieldError]:
    problems = []
    seen = set()
    for index, site in enumerate(values):
        where = f"{path}[{index}]"
        if n_sites is not None and not 0 <= site < n_sites:
            problems.append(FieldError(where, f"site {site} outside 0..{n_sites - 1}"))
        if distinct and site in seen:
            problems.append(FieldError(where, f"duplicated site {site}"))
        seen.add(site)
    return problems


def semantic_problems(config: RunConfig) -> List[FieldError]:
    """Cross-field invariants the schema alone cannot express."""
    problems: List[FieldError] = []
    name = config.experiment
    n_sites = config.n_sites

    if name in GRAPH_EXPERIMENTS:
        if config.graph is None:
            problems.append(FieldError("graph", f"required for the {name} experiment"))
        else:
            problems.extend(config.graph.problems())

    for index, (low, high) in enumerate(config.intervals):
        if not low < high:
            problems.append(FieldError(f"intervals[{index}]", "needs low < high"))
    if name in INTERVAL_EXPERIMENTS and not config.intervals:
        problems.append(FieldError("intervals", f"at least one interval for {name}"))
    if name in {"wegner", "minami", "n-level"} and len(config.intervals) > 1:
        problems.append(FieldError("intervals", f"{name} takes exactly one interval"))

    if config.alpha is not None and config.sets is None:
        problems.append(FieldError("sets", "required when alpha is given"))
    if config.sites is not None:
        problems.extend(_site_problems(config.sites, n_sites, "sites"))
    if config.sets is not None:
        for j, block in enumerate(config.sets):
            if not block:
                problems.append(FieldError(f"sets[{j}]", "must not be empty"))
            problems.extend(_site_problems(block, n_sites, f"sets[{j}]"))
        if config.intervals and len(config.sets) != len(config.intervals):
            problems.append(
                FieldError("sets", f"needs {len(config.intervals)} sets")
            )

    if name == "n-level" and config.n is None:
        problems.append(FieldError("n", "required for the n-level experiment"))
    if name == "spectral-averaging":
        if config.sites is None:
            problems.append(FieldError("sites", "required for spectral-averaging"))
        elif len(config.sites) != len(config.intervals):
            problems.append(
                FieldError("sites", f"needs {len(config.intervals)} sites, one each")
            )
    if name == "profile-event":
        if config.sets is None:
            problems.append(FieldError("sets", "required for profile-event"))
        if config.alpha is None:
            problems.append(FieldError("alpha", "required for profile-event"))

    if name == "two-by-two":
        block = config.two_by_two or TwoByTwoConfig()
        if block.c == 0.0 and block.c_imag == 0.0:
            problems.append(FieldError("two_by_two.c", "must be nonzero"))
        for field_name in ("epsilons", "widths"):
            for index, value in enumerate(getattr(block, field_name)):
                if value <= 0:
                    path = f"two_by_two.{field_name}[{index}]"
                    problems.append(FieldError(path, "must be positive"))

    if name == "multiplicity":
        problems.extend(_multiplicity_problems(config.multiplicity, n_sites))

    if name == "simplicity" and config.simplicity is not None and n_sites is not None:
        if config.simplicity.degree_site >= n_sites:
            problems.append(
                FieldError("simplicity.degree_site", f"outside 0..{n_sites - 1}")
            )
    if name == "gap-rounding" and config.gap_rounding is not None:
        for index, value in enumerate(config.gap_rounding.epsilons):
            if value <= 0:
                problems.append(
                    FieldError(f"gap_rounding.epsilons[{index}]", "must be positive")
                )
    return problems


def _multiplicity_problems(
    block: Optional[MultiplicityConfig], n_sites: Optional[int]
) -> List[FieldError]:
    if block is None:
        return [FieldError("multiplicity", "required for the multiplicity experiment")]
    problems = _site_problems(block.free_sites, n_sites, "multiplicity.free_sites")
    n = len(block.free_sites)
    if n == 0:
        problems.append(FieldError("multiplicity.free_sites", "must not be empty"))
    if block.random_problems == 0:
        if block.targets is None:
            problems.append(
                FieldError("multiplicity.targets", "required without random_problems")
            )
        else:
            if len(block.targets) != n:
                problems.append(
                    FieldError("multiplicity.targets", f"needs {n} values")
                )
            if len(set(block.targets)) != len(block.targets):
                problems.append(
                    FieldError("multiplicity.targets", "must be pairwise distinct")
                )
    if block.target_indices is not None:
        if len(block.target_indices) != n:
            problems.append(
                FieldError("multiplicity.target_indices", f"needs {n} indices")
            )
        problems.extend(
            _site_problems(block.target_indices, n_sites, "multiplicity.target_indices")
        )
    if block.box is not None and not block.box[0] < block.box[1]:
        problems.append(FieldError("multiplicity.box", "needs low < high"))
    return problems


def parse_config(
    text: str,
    environ: Optional[Mapping[str, str]] = None,
    env_file: Optional[Path] = None,
) -> RunConfig:
    """YAML text to a validated RunConfig.

    Args:
        text: YAML document, possibly with ${VAR} or ${VAR:-default} placeholders
        environ: Variables for substitution; the process environment when None
        env_file: Optional dotenv file consulted for variables missing from environ

    Returns:
        The validated configuration

    Raises:
        ConfigError: Listing every substitution, YAML and field problem found
    """
    try:
        text = EnvironmentSubstitution(environ, env_file).substitute(text)
    except ValueError as e:
        raise ConfigError([FieldError("<environment>", str(e))]) from e
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError([FieldError("<document>", f"invalid YAML: {e}")]) from e
    if not isinstance(document, dict):
        raise ConfigError([FieldError("<document>", "expected a mapping at top level")])

    try:
        config = RunConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(
            [FieldError(format_location(err["loc"]), err["msg"]) for err in e.errors()]
        ) from e

    problems = semantic_problems(config)
    if not problems:
        problems = _construction_problems(config)
    if problems:
        raise ConfigError(problems)
    logger.debug(f"Parsed {config.experiment} config {config.config_hash()[:12]}")
    return config


def _construction_problems(config: RunConfig) -> List[FieldError]:
    """Errors raised by the domain constructors, attributed to their block."""
    problems = []
    checks = [("distribution", config.distribution.build)]
    if config.graph is not None:
        checks.append(("graph", config.graph.build))
    for path, build in checks:
        try:
            build()
        except LevelStatError as e:
            problems.append(FieldError(path, str(e)))
    return problems


def resolve_seed(
    config: RunConfig,
    flag: Optional[int] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> int:
    """--seed flag, then LEVELSTAT_SEED, then the config value."""
    if flag is not None:
        return _checked_seed(int(flag), "--seed")
    environ = os.environ if environ is None else environ
    value = environ.get(SEED_VARIABLE, "").strip()
    if value:
        try:
            seed = int(value)
        except ValueError as e:
            raise ConfigError(
                [FieldError(SEED_VARIABLE, f"not an integer: {value!r}")]
            ) from e
        return _checked_seed(seed, SEED_VARIABLE)
    return config.seed


def _checked_seed(seed: int, source: str) -> int:
    if not 0 <= seed <= MAX_SEED:
        raise ConfigError([FieldError(source, f"must lie in 0..2**64-1, got {seed}")])
    return seed
