"""Run-time enforcement of the adversary interface."""

from __future__ import annotations

import logging
from collections.abc import Sequence

from secpart import Accept, Adversary, Decision, Emit, Observation
from secpart.adversary.redaction import Redactor
from secpart.adversary.scripted import emission_problem
from secpart.errors import InterfaceViolationError
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment
from secpart.lang.values import Channel

logger = logging.getLogger(__name__)


class InterfaceMonitor(Adversary):
    """Wraps any adversary, simulators included, and rejects decisions the interface forbids.

    Args:
        adversary: The adversary to watch.
        env: Host labels.
        attack: Decides which hosts the adversary may speak for and which payloads it may see.

    """

    def __init__(self, adversary: Adversary, env: HostEnvironment, attack: Attack = EMPTY_ATTACK) -> None:
        """Initialize the monitor."""
        self.adversary = adversary
        self.env = env
        self.attack = attack
        self.redactor = Redactor(env, attack)
        self.decisions = 0

    def decide(self, ready: Sequence[Channel]) -> Decision:
        """Ask the wrapped adversary and check its answer.

        Raises:
            InterfaceViolationError: If it accepts a channel that is not ready or forges a forbidden message.

        """
        decision = self.adversary.decide(ready)
        self.decisions += 1
        logger.debug("Decision %d: %s", self.decisions, decision)
        if isinstance(decision, Accept) and decision.channel not in ready:
            raise InterfaceViolationError(f"Decision {self.decisions}: {decision.channel} is not ready")
        if isinstance(decision, Emit):
            problem = emission_problem(decision.message, self.env, self.attack)
            if problem is not None:
                raise InterfaceViolationError(f"Decision {self.decisions}: cannot emit {decision.message}: {problem}")
        return decision

    def observe(self, observation: Observation) -> None:
        """Pass an observation on after checking it is redacted.

        Raises:
            InterfaceViolationError: If an honest payload would reach the adversary.

        """
        if observation.value is not None and self.redactor.hides(observation.channel):
            raise InterfaceViolationError(f"Payload on {observation.channel} should be redacted")
        self.adversary.observe(observation)
