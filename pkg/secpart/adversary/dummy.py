"""The adversary that only schedules."""

from __future__ import annotations

from collections.abc import Sequence

from secpart import HALT, Accept, Adversary, Decision, Observation
from secpart.lang.values import Channel


class DummyAdversary(Adversary):
    """Accepts the first ready channel every turn and never emits; halts when nothing is ready."""

    def __init__(self) -> None:
        """Initialize with an empty history."""
        self.history: list[Observation] = []

    def decide(self, ready: Sequence[Channel]) -> Decision:
        """Accept the smallest ready channel."""
        if not ready:
            return HALT
        return Accept(ready[0])

    def observe(self, observation: Observation) -> None:
        """Remember the observation."""
        self.history.append(observation)
