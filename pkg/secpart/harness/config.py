"""Harness settings: built-in defaults, overridden by environment variables, overridden by flags."""

from __future__ import annotations

import dataclasses
import logging
import os
from collections.abc import Mapping
from dataclasses import dataclass

from dotenv import load_dotenv

from secpart.harness.runner import DEFAULT_ENV_DOMAIN
from secpart.lang.values import DEFAULT_DOMAIN, Value, parse_domain

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass(frozen=True)
class HarnessSettings:
    """Knobs of the simulation harness."""

    #: Values the adversary may send.
    domain: tuple[Value, ...] = DEFAULT_DOMAIN

    #: Values the environment feeds to input sites.
    env_domain: tuple[Value, ...] = DEFAULT_ENV_DOMAIN

    #: Scheduling decisions the adversary family varies.
    depth: int = 6

    #: Ready channels considered at each varied decision.
    branching: int = 2

    #: Logging level of the command line.
    log_level: str = "WARNING"

    def __post_init__(self) -> None:
        """Validate the settings.

        Raises:
            ValueError: If a value is out of range.

        """
        if not self.domain or not self.env_domain:
            raise ValueError("Value domains must not be empty")
        if self.depth < 0:
            raise ValueError(f"depth must be non-negative, got {self.depth}")
        if self.branching < 1:
            raise ValueError(f"branching must be positive, got {self.branching}")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ValueError(f"Invalid log level: {self.log_level}. Must be one of: {', '.join(LOG_LEVELS)}")

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None, *, dotenv: bool = True) -> HarnessSettings:
        """Read `SECPART_*` variables, loading a `.env` file first unless told not to.

        Raises:
            ValueError: If a variable does not parse.

        """
        if environ is None:
            if dotenv:
                load_dotenv()
            environ = os.environ
        settings = cls()
        overrides: dict[str, object] = {}
        if raw := environ.get("SECPART_DOMAIN"):
            overrides["domain"] = parse_domain(raw)
        if raw := environ.get("SECPART_ENV_DOMAIN"):
            overrides["env_domain"] = parse_domain(raw)
        if raw := environ.get("SECPART_DEPTH"):
            overrides["depth"] = int(raw)
        if raw := environ.get("SECPART_BRANCHING"):
            overrides["branching"] = int(raw)
        if raw := environ.get("SECPART_LOG_LEVEL"):
            overrides["log_level"] = raw.upper()
        if overrides:
            logger.debug("Settings from the environment: %s", sorted(overrides))
        return dataclasses.replace(settings, **overrides)

    def override(self, **flags: object) -> HarnessSettings:
        """Apply command-line flags; `None` means the flag was not given."""
        given = {name: value for name, value in flags.items() if value is not None}
        return dataclasses.replace(self, **given)
