"""What the adversary may see of an action."""

from __future__ import annotations

from dataclasses import dataclass

from secpart import Observation
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment
from secpart.lang.values import Channel
from secpart.semantics.actions import Action


@dataclass(frozen=True, eq=False)
class Redactor:
    """Hides the payload of messages between honest endpoints.

    The environment and the ideal host count as honest, the adversary does not.
    """

    #: Host labels.
    env: HostEnvironment

    #: Decides which hosts are honest.
    attack: Attack = EMPTY_ATTACK

    def hides(self, channel: Channel) -> bool:
        """Whether both ends of a channel are honest."""
        return self.env.is_honest_endpoint(channel.sender, self.attack) and self.env.is_honest_endpoint(
            channel.receiver, self.attack
        )

    def observe(self, action: Action) -> Observation:
        """The adversary's view of an action."""
        value = None if self.hides(action.channel) else action.message.value
        return Observation(action.direction, action.channel, value)
