"""Messages, actions and the steps that carry them."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import Any, Generic, TypeVar

from secpart.enums import Direction
from secpart.lang.values import (
    ENVIRONMENT,
    UNIT,
    Channel,
    Endpoint,
    Value,
    endpoint_from_name,
    value_from_json,
    value_to_json,
)

T = TypeVar("T")


@dataclass(frozen=True)
class Message:
    """A value travelling on a channel."""

    #: The sending endpoint.
    sender: Endpoint

    #: The receiving endpoint.
    receiver: Endpoint

    #: The payload.
    value: Value

    @property
    def channel(self) -> Channel:
        """The channel the message travels on."""
        return Channel(self.sender, self.receiver)

    def __str__(self) -> str:
        """Render as `sender->receiver value`."""
        return f"{self.sender}->{self.receiver} {self.value}"


@dataclass(frozen=True)
class Action:
    """A transition label: a message received or sent.

    Internal steps are outputs from a host to itself carrying unit.
    """

    #: Whether the message is received or sent.
    direction: Direction

    #: The message.
    message: Message

    @classmethod
    def receive(cls, sender: Endpoint, receiver: Endpoint, value: Value) -> Action:
        """An input action."""
        return cls(Direction.INPUT, Message(sender, receiver, value))

    @classmethod
    def send(cls, sender: Endpoint, receiver: Endpoint, value: Value) -> Action:
        """An output action."""
        return cls(Direction.OUTPUT, Message(sender, receiver, value))

    @classmethod
    def internal(cls, host: Endpoint) -> Action:
        """An internal step of `host`."""
        return cls(Direction.OUTPUT, Message(host, host, UNIT))

    @property
    def is_input(self) -> bool:
        """Whether the action receives a message."""
        return self.direction is Direction.INPUT

    @property
    def is_output(self) -> bool:
        """Whether the action sends a message."""
        return self.direction is Direction.OUTPUT

    @property
    def is_internal(self) -> bool:
        """Whether the action is an internal step."""
        return self.is_output and self.message.channel.is_internal

    @property
    def actor(self) -> Endpoint:
        """The endpoint performing the action: the receiver of inputs, the sender of outputs."""
        return self.message.receiver if self.is_input else self.message.sender

    @property
    def channel(self) -> Channel:
        """The channel of the message."""
        return self.message.channel

    @property
    def touches_environment(self) -> bool:
        """Whether the environment sends or receives the message."""
        return self.channel.touches_environment

    def to_dict(self) -> dict[str, Any]:
        """Serialize as `{dir, from, to, value}`."""
        return {
            "dir": "in" if self.is_input else "out",
            "from": self.message.sender.name,
            "to": self.message.receiver.name,
            "value": value_to_json(self.message.value),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Action:
        """Deserialize an action written by `to_dict`."""
        direction = Direction.INPUT if data["dir"] == "in" else Direction.OUTPUT
        sender, receiver = endpoint_from_name(data["from"]), endpoint_from_name(data["to"])
        message = Message(sender, receiver, value_from_json(data["value"]))
        return cls(direction, message)

    def __str__(self) -> str:
        """Render as `in env->alice 5` or `out alice->env true`."""
        return f"{'in' if self.is_input else 'out'} {self.message}"


#: A sequence of actions.
Trace = tuple[Action, ...]


def env_restrict(trace: Iterable[Action]) -> Trace:
    """Keep only the actions the environment sends or receives, in order."""
    return tuple(action for action in trace if action.touches_environment)


def trace_to_json(trace: Iterable[Action]) -> list[dict[str, Any]]:
    """Serialize a trace as a list of action dictionaries."""
    return [action.to_dict() for action in trace]


def trace_from_json(data: Iterable[dict[str, Any]]) -> Trace:
    """Deserialize a trace written by `trace_to_json`."""
    return tuple(Action.from_dict(item) for item in data)


def format_trace(trace: Iterable[Action]) -> str:
    """Render a trace one action per line."""
    return "\n".join(str(action) for action in trace)


def base_rule(rule: str) -> str:
    """The rule that produced a step, without the lifting and process rules wrapped around it.

    Lifted steps are named like `S-Delay:S-Communicate-Send`, process steps like `P-Output:E-Output`.
    """
    return rule.rsplit(":", 1)[-1]


@dataclass(frozen=True)
class Step(Generic[T]):
    """An enabled transition: the action, the successor, and the rule that produced it."""

    #: The transition label.
    action: Action

    #: The successor state.
    target: T

    #: Name of the stepping rule, such as `S-Let` or `P-Internal`.
    rule: str

    #: The host performing the step; differs from the action's actor only for flipped downgrades.
    host: Endpoint = ENVIRONMENT

    #: The buffered message a waiting statement read, for steps that feed a demand.
    consumed: Message | None = None


@dataclass(frozen=True)
class Demand(Generic[T]):
    """A statement waiting for a message on a channel.

    Processes feed demands from their buffers; the step is internal at `host`.
    """

    #: The channel the statement reads.
    channel: Channel

    #: The host performing the read.
    host: Endpoint

    #: Name of the stepping rule.
    rule: str

    #: The successor for a received value.
    resume: Callable[[Value], T]

    #: Whether the statement can accept a value; `case` only accepts its branch values.
    accepts: Callable[[Value], bool] = lambda _: True

    def map(self, fn: Callable[[T], Any], rule: str | None = None) -> Demand[Any]:
        """Wrap the successor, as a surrounding context does."""
        resume = self.resume
        return Demand(self.channel, self.host, rule or self.rule, lambda value: fn(resume(value)), self.accepts)
