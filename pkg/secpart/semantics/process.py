"""Processes: a set of hosts, their message buffer and the statement they run."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

from secpart.errors import DeterminismViolationError, NotEnabledError
from secpart.lang.ast import Skip, Stmt
from secpart.lang.printer import pretty_print
from secpart.lang.values import ADVERSARY, Channel, Endpoint
from secpart.semantics.actions import Action, Demand, Message, Step, base_rule
from secpart.semantics.buffer import EMPTY_BUFFER, Buffer
from secpart.semantics.rules import Semantics
from secpart.semantics.statements import stmt_moves
from secpart.utils import host_names

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProcessState:
    """A statement run by a set of hosts, with the messages they received but did not read yet."""

    #: The hosts the process speaks for.
    hosts: frozenset[Endpoint]

    #: Received, unread messages.
    buffer: Buffer

    #: The remaining program.
    stmt: Stmt

    @classmethod
    def of(cls, hosts: Iterable[Endpoint], stmt: Stmt, buffer: Buffer = EMPTY_BUFFER) -> ProcessState:
        """Build a process state."""
        return cls(frozenset(hosts), buffer, stmt)

    @property
    def finished(self) -> bool:
        """Whether the statement ran to completion."""
        return isinstance(self.stmt, Skip)

    def to_dict(self) -> dict[str, Any]:
        """Snapshot for reports and golden tests."""
        return {
            "hosts": host_names(self.hosts),
            "buffer": self.buffer.to_dict(),
            "stmt": pretty_print(self.stmt),
        }


def buffers_input(sem: Semantics, p: ProcessState, channel: Channel) -> bool:
    """Whether the process keeps a message on `channel` rather than discarding it.

    Messages from outside to one of the process hosts are kept. A simulator's model also keeps the
    values declassified by its hosts, which arrive on the channel from the host to the adversary.
    """
    if channel.sender not in p.hosts and channel.receiver in p.hosts:
        return True
    return sem.flips_declassify and channel.receiver == ADVERSARY and channel.sender in p.hosts


def process_outputs(sem: Semantics, p: ProcessState) -> list[Step[ProcessState]]:
    """Output and internal steps of a process, feeding waiting statements from the buffer."""
    steps: list[Step[ProcessState]] = []
    for move in stmt_moves(sem, p.stmt):
        if isinstance(move, Demand):
            front = p.buffer.front(move.channel)
            if front is None or not move.accepts(front):
                continue
            value, rest = p.buffer.pop(move.channel)
            successor = ProcessState(p.hosts, rest, move.resume(value))
            consumed = Message(move.channel.sender, move.channel.receiver, value)
            rule = f"P-Internal:{base_rule(move.rule)}"
            steps.append(Step(Action.internal(move.host), successor, rule, move.host, consumed))
        else:
            successor = ProcessState(p.hosts, p.buffer, move.target)
            steps.append(Step(move.action, successor, f"P-Output:{base_rule(move.rule)}", move.host))
    _check_deterministic(steps)
    return steps


def _check_deterministic(steps: list[Step[ProcessState]]) -> None:
    seen: dict[Action, ProcessState] = {}
    channels: dict[Channel, Action] = {}
    for step in steps:
        previous = seen.setdefault(step.action, step.target)
        if previous != step.target:
            raise DeterminismViolationError(f"Two successors for {step.action}")
        other = channels.setdefault(step.action.channel, step.action)
        if other != step.action:
            raise DeterminismViolationError(f"Two outputs on {step.action.channel}: {other} and {step.action}")


def enabled_process_outputs(sem: Semantics, p: ProcessState) -> list[Action]:
    """Actions the process can send, internal steps included."""
    return [step.action for step in process_outputs(sem, p)]


def step_process(sem: Semantics, p: ProcessState, action: Action) -> ProcessState:
    """Take a step.

    Inputs are always accepted: kept in the buffer when relevant, otherwise discarded.

    Raises:
        NotEnabledError: If an output is not enabled.

    """
    if action.is_input:
        if buffers_input(sem, p, action.channel):
            return ProcessState(p.hosts, p.buffer.push(action.channel, action.message.value), p.stmt)
        return p
    for step in process_outputs(sem, p):
        if step.action == action:
            return step.target
    raise NotEnabledError(f"{action} is not enabled at process {host_names(p.hosts)}")
