"""Staged experiment plugins.

Every experiment runs PARSE → DO → REVIEW → OUTPUT. Stages talk to each
other only through ``context.metadata``; numerics run off the event loop in
``asyncio.to_thread``.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, List, Optional

from .config import RunConfig
from .records import ResultRecord, ResultTable

PARSE = "parse"
DO = "do"
REVIEW = "review"
OUTPUT = "output"

STAGES = (PARSE, DO, REVIEW, OUTPUT)


@dataclass
class ExperimentContext:
    config: RunConfig
    threads: Optional[int] = None
    current_stage: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)


class Experiment:
    """A staged run; subclasses supply ``prepare``, ``compute`` and ``tables``."""

    name: ClassVar[str] = ""
    supported_stages = list(STAGES)

    def __init__(self, config: RunConfig):
        if config.experiment != self.name:
            raise ValueError(
                f"{type(self).__name__} runs '{self.name}', got a "
                f"'{config.experiment}' config"
            )
        self.config = config
        self.logger = logging.getLogger(f"{__name__}.{self.name}")

    async def execute(self, context: ExperimentContext) -> ResultRecord:
        for stage in self.supported_stages:
            context.current_stage = stage
            message = await self._execute_impl(context)
            self.logger.debug(message)
        return context.metadata["record"]

    async def _execute_impl(self, context: ExperimentContext) -> str:
        """Route execution to the stage handler."""
        stage = context.current_stage
        if stage == PARSE:
            return await self._handle_parse_stage(context)
        if stage == DO:
            return await self._handle_do_stage(context)
        if stage == REVIEW:
            return await self._handle_review_stage(context)
        if stage == OUTPUT:
            return await self._handle_output_stage(context)
        raise RuntimeError(f"Unknown stage '{stage}' for experiment {self.name}")

    async def _handle_parse_stage(self, context: ExperimentContext) -> str:
        inputs = self.prepare(context.config)
        context.metadata["inputs"] = inputs
        self.logger.info(
            f"PARSE: {self.name} seed={context.config.seed} "
            f"n_samples={context.config.n_samples}"
        )
        return f"[PARSE] {self.name} inputs built"

    async def _handle_do_stage(self, context: ExperimentContext) -> str:
        inputs = context.metadata["inputs"]
        results = await asyncio.to_thread(self.compute, inputs, context.threads)
        context.metadata["results"] = results
        self.logger.info(f"DO: {self.name} finished")
        return f"[DO] {self.name} computed"

    async def _handle_review_stage(self, context: ExperimentContext) -> str:
        results = context.metadata["results"]
        summary: Dict[str, Any] = {}
        violations = self.review(results, summary)
        context.metadata["summary"] = summary
        context.metadata["violations"] = violations
        status = "VIOLATED: " + ", ".join(violations) if violations else "consistent"
        if violations:
            self.logger.warning(f"REVIEW: {self.name} {status}")
        else:
            self.logger.info(f"REVIEW: {self.name} {status}")
        return f"[REVIEW] {status}"

    async def _handle_output_stage(self, context: ExperimentContext) -> str:
        config = context.config
        results = context.metadata["results"]
        record = ResultRecord(
            experiment=self.name,
            config_hash=config.config_hash(),
            seed=config.seed,
            tables=self.tables(results),
            reports=list(self.reports(results)),
            summary=context.metadata["summary"],
            violations=context.metadata["violations"],
        )
        context.metadata["record"] = record
        self.logger.info(f"OUTPUT: {len(record.tables)} table(s)")
        return f"[OUTPUT] {self.name} record ready"

    def prepare(self, config: RunConfig) -> Any:
        raise NotImplementedError

    def compute(self, inputs: Any, threads: Optional[int]) -> Any:
        raise NotImplementedError

    def review(self, results: Any, summary: Dict[str, Any]) -> List[str]:
        """Fill ``summary`` and return the names of contradicted proven statements."""
        return []

    def tables(self, results: Any) -> List[ResultTable]:
        raise NotImplementedError

    def reports(self, results: Any) -> List[Any]:
        return []
