"""Validation of a candidate choreography against the source program it claims to implement."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from secpart.checking import Report, SyncContext, check_stmt, check_sync
from secpart.checking.type_checker import TypeReport
from secpart.enums import SyncInit
from secpart.errors import TierError
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment
from secpart.lang.analysis import alpha_equal
from secpart.lang.ast import Stmt
from secpart.lang.printer import pretty_print
from secpart.transform.extraction import source_of

logger = logging.getLogger(__name__)


@dataclass
class SynthesisReport:
    """Outcome of each of the three validity conditions."""

    #: Whether the choreography's canonical source equals the source program up to renaming.
    extraction: bool

    #: Information-flow typing of the choreography.
    typing: TypeReport

    #: Synchronization of the choreography.
    sync: Report

    #: The extracted source program, when extraction succeeded at all.
    extracted: Stmt | None = None

    #: Why extraction failed.
    extraction_message: str = ""

    #: Names of the failed conditions.
    failures: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Collect the failed conditions."""
        self.failures = [
            name
            for name, ok in (("extraction", self.extraction), ("typing", self.typing.ok), ("sync", self.sync.ok))
            if not ok
        ]

    @property
    def ok(self) -> bool:
        """Whether the choreography is a valid result of protocol synthesis."""
        return not self.failures

    def __bool__(self) -> bool:
        """Truthiness is validity."""
        return self.ok

    def to_dict(self) -> dict[str, object]:
        """Serialize for JSON output."""
        return {
            "ok": self.ok,
            "failures": self.failures,
            "extraction": {"ok": self.extraction, "message": self.extraction_message},
            "typing": self.typing.to_dict(),
            "sync": self.sync.to_dict(),
        }


def validate_synthesis(
    source: Stmt,
    choreography: Stmt,
    env: HostEnvironment,
    attack: Attack = EMPTY_ATTACK,
    sync_init: SyncInit = SyncInit.TOP,
) -> SynthesisReport:
    """Check that a choreography validly realizes a source program.

    Args:
        source: The source program.
        choreography: The candidate choreography.
        env: Host labels.
        attack: Decides which downgrades and IO are external for the sync check.
        sync_init: Starting synchronization context.

    Returns:
        A report with one verdict per condition; all three are always evaluated.

    """
    extracted: Stmt | None = None
    message = ""
    try:
        extracted = source_of(choreography)
    except TierError as exc:
        message = str(exc)
    matches = extracted is not None and alpha_equal(extracted, source)
    if extracted is not None and not matches:
        message = f"Extracted source differs from the given program:\n{pretty_print(extracted)}"

    typing = check_stmt(None, choreography, env, attack)
    sync = check_sync(SyncContext.initial(env, sync_init), choreography, env, attack)
    report = SynthesisReport(matches, typing, sync, extracted, message)
    logger.info("Synthesis validation %s", "passed" if report.ok else f"failed: {', '.join(report.failures)}")
    return report
