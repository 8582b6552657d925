"""Configured, staged experiment runs and their result files."""

from .base import DO, OUTPUT, PARSE, REVIEW, STAGES, Experiment, ExperimentContext
from .config import (
    EXPERIMENT_NAMES,
    OutputConfig,
    RunConfig,
    format_location,
    parse_config,
    resolve_seed,
    semantic_problems,
)
from .environment import EnvironmentSubstitution
from .records import (
    ResultRecord,
    ResultTable,
    emit_csv,
    emit_json,
    estimator_table,
    format_cell,
)
from .runners import EXPERIMENTS, run, run_async

__all__ = [
    "DO",
    "OUTPUT",
    "PARSE",
    "REVIEW",
    "STAGES",
    "Experiment",
    "ExperimentContext",
    "EXPERIMENT_NAMES",
    "OutputConfig",
    "RunConfig",
    "format_location",
    "parse_config",
    "resolve_seed",
    "semantic_problems",
    "EnvironmentSubstitution",
    "ResultRecord",
    "ResultTable",
    "emit_csv",
    "emit_json",
    "estimator_table",
    "format_cell",
    "EXPERIMENTS",
    "run",
    "run_async",
]
