"""Diagnostics reported by the checkers."""

from __future__ import annotations

from dataclasses import dataclass, field

from secpart.lang.ast import Position


@dataclass(frozen=True)
class Diagnostic:
    """A failed premise of a checking rule."""

    #: Name of the rule whose premise failed, such as `Lbl-Let`.
    rule: str

    #: Human readable explanation.
    message: str

    #: Where the offending statement starts, when known.
    position: Position | None = None

    def to_dict(self) -> dict[str, str | None]:
        """Serialize as `{rule, position, message}`."""
        return {"rule": self.rule, "position": str(self.position) if self.position else None, "message": self.message}

    def __str__(self) -> str:
        """Render as `position: rule: message`."""
        where = f"{self.position}: " if self.position else ""
        return f"{where}{self.rule}: {self.message}"


@dataclass
class Report:
    """Collected diagnostics of one checker run."""

    #: Every failure found, in program order.
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """Whether the program passed."""
        return not self.diagnostics

    def __bool__(self) -> bool:
        """Truthiness is success."""
        return self.ok

    def add(self, rule: str, message: str, position: Position | None = None) -> None:
        """Record a failure."""
        self.diagnostics.append(Diagnostic(rule, message, position))

    def rules(self) -> set[str]:
        """Names of every failing rule."""
        return {d.rule for d in self.diagnostics}

    def to_dict(self) -> dict[str, object]:
        """Serialize for JSON output."""
        return {"ok": self.ok, "diagnostics": [d.to_dict() for d in self.diagnostics]}
