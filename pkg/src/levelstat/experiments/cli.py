"""Command line entry point: ``levelstat <experiment> --config run.yaml``.

Exit codes: 0 success, 1 configuration/numerical/I-O failure, 2 usage error
(argparse), 3 a proven statement was contradicted by the run.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from ..errors import (
    BoundViolation,
    ConfigError,
    FieldError,
    LevelStatError,
)
from .config import EXPERIMENT_NAMES, RunConfig, parse_config, resolve_seed
from .records import ResultRecord, emit_csv, emit_json
from .runners import run

logger = logging.getLogger(__name__)

ENV_FILE = ".env"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levelstat",
        description="Seeded experiments on eigenvalue statistics of random operators",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  levelstat wegner --config configs/wegner.yaml
  levelstat two-by-two --config configs/two_by_two.yaml --threads 8 --out results
  LEVELSTAT_SEED=7 levelstat minami --config configs/minami.yaml
""",
    )
    subparsers = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENT_NAMES:
        sub = subparsers.add_parser(name, help=f"Run the {name} experiment")
        sub.add_argument("--config", "-c", required=True, type=Path, help="YAML config")
        sub.add_argument("--seed", type=int, help="Override the config seed")
        sub.add_argument(
            "--threads",
            type=int,
            help="Worker threads (default: all cores; never changes results)",
        )
        sub.add_argument("--out", type=Path, help="Output directory")
        sub.add_argument("--verbose", "-v", action="store_true", help="DEBUG logging")
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def load_config(path: Path, experiment: str, seed: Optional[int]) -> RunConfig:
    text = path.read_text(encoding="utf-8")
    config = parse_config(text, env_file=Path(ENV_FILE))
    if config.experiment != experiment:
        raise ConfigError(
            [
                FieldError(
                    "experiment",
                    f"config is for '{config.experiment}', command is '{experiment}'",
                )
            ]
        )
    return config.with_seed(resolve_seed(config, seed, os.environ))


def write_outputs(
    record: ResultRecord, config: RunConfig, out: Optional[Path]
) -> List[Path]:
    directory = out if out is not None else Path(config.output.directory)
    stem = config.output.stem or config.experiment.replace("-", "_")
    written: List[Path] = []
    if "csv" in config.output.formats:
        written.extend(emit_csv(record, directory / f"{stem}.csv"))
    if "json" in config.output.formats:
        written.append(emit_json(record, directory / f"{stem}.json"))
    return written


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    if args.threads is not None and args.threads < 1:
        logger.error(f"--threads must be positive, got {args.threads}")
        return EXIT_ERROR
    try:
        config = load_config(args.config, args.experiment, args.seed)
        logger.info(
            f"Running {config.experiment} seed={config.seed} "
            f"config={config.config_hash()[:12]}"
        )
        record = run(config, args.threads)
        write_outputs(record, config, args.out)
    except BoundViolation as e:
        logger.error(f"Bound violated: {e}")
        return EXIT_VIOLATION
    except ConfigError as e:
        for error in e.errors:
            logger.error(f"config {error}")
        return EXIT_ERROR
    except (LevelStatError, ValueError, OSError) as e:
        logger.error(f"{args.experiment} failed: {e}")
        return EXIT_ERROR

    if record.violations:
        logger.error(f"Proven bound(s) violated: {', '.join(record.violations)}")
        return EXIT_VIOLATION
    if record.summary.get("conjecture_violated"):
        logger.info("Conjectured bound exceeded (recorded, not an error)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
