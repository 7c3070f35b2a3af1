"""secpart - Secure program partitioning: compile, check and simulate choreographies."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from secpart.enums import Direction
from secpart.lang.values import Channel, Value
from secpart.semantics.actions import Message

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Accept:
    """Let the configuration send its enabled output on a channel."""

    #: The ready channel to accept from.
    channel: Channel

    def __str__(self) -> str:
        """Render in script syntax."""
        return f"accept {self.channel}"


@dataclass(frozen=True)
class Emit:
    """Inject a message into the configuration."""

    #: The forged message; its sender is the adversary or a malicious host.
    message: Message

    def __str__(self) -> str:
        """Render in script syntax."""
        return f"emit {self.message}"


@dataclass(frozen=True)
class Halt:
    """Stop scheduling; the run ends here."""

    def __str__(self) -> str:
        """Render in script syntax."""
        return "halt"


#: One adversary turn.
Decision = Accept | Emit | Halt

HALT = Halt()


@dataclass(frozen=True)
class Observation:
    """What the adversary learns from one action of the configuration.

    The payload is `None` when both ends of the channel are honest.
    """

    #: Whether the configuration received or sent the message.
    direction: Direction

    #: The channel the message travelled on.
    channel: Channel

    #: The payload, or `None` when redacted.
    value: Value | None

    def __str__(self) -> str:
        """Render like an action, with `#` for a redacted payload."""
        shown = "#" if self.value is None else str(self.value)
        return f"{'in' if self.direction is Direction.INPUT else 'out'} {self.channel} {shown}"


class Adversary:
    """Defines the interface for adversaries.

    The harness alternates between asking for a decision and reporting what the adversary saw. Every
    accepted output is observed; emissions are not echoed back. Adversaries are single-use: build a fresh
    one for every run.
    """

    def decide(self, ready: Sequence[Channel]) -> Decision:
        """Choose the next turn given the channels with an enabled output, sorted."""
        raise NotImplementedError

    def observe(self, observation: Observation) -> None:
        """Record an action of the configuration, already redacted."""
        raise NotImplementedError


class Simulator(Adversary):
    """Defines the interface for simulators: adversaries built around another adversary.

    A simulator faces the source side of a compilation step while running the wrapped adversary against
    its own model of the target side.
    """

    def __init__(self, inner: Adversary) -> None:
        """Initialize the simulator.

        Args:
            inner: The adversary attacking the target side.

        """
        self.inner = inner
        self.divergence: str | None = None

    def diverge(self, reason: str) -> None:
        """Record the first point where the model and the source side disagree."""
        if self.divergence is None:
            self.divergence = reason
            logger.warning("%s gives up: %s", type(self).__name__, reason)


__all__ = ["HALT", "Accept", "Adversary", "Decision", "Emit", "Halt", "Observation", "Simulator"]
