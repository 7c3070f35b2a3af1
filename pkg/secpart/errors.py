"""Exceptions raised by secpart."""

from __future__ import annotations


class SecpartError(ValueError):
    """Base class for all secpart errors."""


class LabelSyntaxError(SecpartError):
    """A principal or label could not be parsed."""


class InvalidAttackError(SecpartError):
    """An attack marks an atom untrusted without marking it public, or names unknown atoms."""


class HostEnvironmentError(SecpartError):
    """A host environment is malformed or a host is unknown."""


class ProgramSyntaxError(SecpartError):
    """A program text does not follow the grammar."""

    def __init__(self, message: str, line: int, column: int) -> None:
        """Initialize the error.

        Args:
            message: What went wrong.
            line: 1-based line of the offending token.
            column: 1-based column of the offending token.

        """
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class TierError(SecpartError):
    """A program uses constructs outside the tier it declares."""


class MaliciousIfError(SecpartError):
    """Corruption met a conditional guarded at a malicious host."""


class DuplicateBranchError(SecpartError):
    """A case lists the same value in two branches."""


class MergeFailureError(SecpartError):
    """Two branch projections cannot be merged."""


class NotEnabledError(SecpartError):
    """The requested action is not enabled."""


class StuckBranchError(NotEnabledError):
    """An action is enabled in only one branch of a delayed conditional."""


class DeterminismViolationError(SecpartError):
    """A state offers two successors for one action, or two outputs on one channel."""


class DepthExceededError(SecpartError):
    """A run was still active when the step bound was reached."""


class ShapeMismatchError(SecpartError):
    """Two statements differ in structure, not only in values."""


class InterfaceViolationError(SecpartError):
    """An adversary decision breaks the adversary interface."""


class ScriptSyntaxError(SecpartError):
    """An adversary script file could not be parsed."""


class ModeMismatchError(SecpartError):
    """A configuration runs under a stepping discipline the component was not built for."""
