"""Environment variable substitution for run configuration files."""

from __future__ import annotations

import logging
import os
import re
from pathlib import Path
from typing import List, Mapping, Optional

logger = logging.getLogger(__name__)

MAX_PASSES = 5

PLACEHOLDER = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)(?:(:-?)(.*?))?\}")


class EnvironmentSubstitution:
    """Replaces ``${VAR}``, ``${VAR:default}`` and ``${VAR:-default}`` placeholders.

    ``:-`` also falls back to the default when the variable is set but blank.
    Substitution runs until nothing changes, at most five passes, so a value
    may itself contain placeholders.
    """

    def __init__(
        self,
        environ: Optional[Mapping[str, str]] = None,
        env_file: Optional[Path] = None,
    ):
        self.environ = dict(os.environ if environ is None else environ)
        if env_file is not None and Path(env_file).exists():
            self._load_env_file(Path(env_file))

    def _load_env_file(self, path: Path) -> None:
        """KEY=VALUE lines; variables already set take precedence."""
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, value = (part.strip() for part in line.split("=", 1))
            if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
                value = value[1:-1]
            self.environ.setdefault(key, value)
        logger.info(f"Loaded environment variables from {path}")

    def missing(self, text: str) -> List[str]:
        """Names referenced without a default that are not set."""
        return sorted(
            {
                match.group(1)
                for match in PLACEHOLDER.finditer(text)
                if match.group(2) is None and match.group(1) not in self.environ
            }
        )

    def substitute(self, text: str) -> str:
        def replace(match: re.Match) -> str:
            name, separator, default = match.group(1), match.group(2), match.group(3)
            value = self.environ.get(name)
            if value is not None:
                if separator == ":-" and not value.strip():
                    return default or ""
                return value
            if separator:
                return default or ""
            raise ValueError(
                f"Environment variable '{name}' is not set and no default provided"
            )

        for _ in range(MAX_PASSES):
            substituted = PLACEHOLDER.sub(replace, text)
            if substituted == text:
                break
            text = substituted
        return text
