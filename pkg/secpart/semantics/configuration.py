"""Parallel composition of processes."""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from typing import Any

from secpart.errors import DepthExceededError, DeterminismViolationError, HostEnvironmentError, NotEnabledError
from secpart.lang.values import Channel, Endpoint
from secpart.semantics.actions import Action, Step, Trace, env_restrict
from secpart.semantics.process import ProcessState, process_outputs, step_process
from secpart.semantics.rules import Semantics
from secpart.utils import host_names

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Configuration:
    """Processes running side by side under one stepping discipline.

    Configurations compare and hash by their processes only.
    """

    #: The processes, with pairwise disjoint host sets.
    processes: tuple[ProcessState, ...]

    #: How every process steps.
    semantics: Semantics = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        """Check that no host belongs to two processes.

        Raises:
            HostEnvironmentError: If host sets overlap.

        """
        object.__setattr__(self, "processes", tuple(self.processes))
        seen: set[Endpoint] = set()
        for process in self.processes:
            shared = seen & process.hosts
            if shared:
                raise HostEnvironmentError(f"Hosts {host_names(shared)} belong to two processes")
            seen |= process.hosts

    @property
    def hosts(self) -> frozenset[Endpoint]:
        """Every host of every process."""
        return frozenset().union(*(p.hosts for p in self.processes))

    @property
    def finished(self) -> bool:
        """Whether every process ran to completion."""
        return all(p.finished for p in self.processes)

    def replace(self, index: int, process: ProcessState) -> Configuration:
        """The configuration with one process replaced."""
        processes = list(self.processes)
        processes[index] = process
        return Configuration(tuple(processes), self.semantics)

    def to_dict(self) -> dict[str, Any]:
        """Snapshot for reports and golden tests."""
        return {"mode": self.semantics.mode.name, "processes": [p.to_dict() for p in self.processes]}


def deliver(c: Configuration, action: Action, skip: int | None = None) -> Configuration:
    """Give an input to every process except the one at index `skip`."""
    incoming = Action.receive(action.message.sender, action.message.receiver, action.message.value)
    processes = tuple(
        p if index == skip else step_process(c.semantics, p, incoming) for index, p in enumerate(c.processes)
    )
    return Configuration(processes, c.semantics)


def enabled_config_steps(c: Configuration) -> list[Step[Configuration]]:
    """Every output and internal step of the configuration.

    The output of one process is an input of every other process.

    Raises:
        DeterminismViolationError: If two steps share an action or two outputs share a channel.

    """
    steps: list[Step[Configuration]] = []
    for index, process in enumerate(c.processes):
        for step in process_outputs(c.semantics, process):
            successor = deliver(c.replace(index, step.target), step.action, skip=index)
            steps.append(Step(step.action, successor, step.rule, step.host, step.consumed))
    by_channel: dict[Channel, Action] = {}
    for step in steps:
        other = by_channel.setdefault(step.action.channel, step.action)
        if other != step.action:
            raise DeterminismViolationError(f"Two outputs on {step.action.channel}: {other} and {step.action}")
    return steps


def ready_channels(c: Configuration) -> list[Channel]:
    """Channels with an enabled output, sorted."""
    return sorted(step.action.channel for step in enabled_config_steps(c))


def output_on(c: Configuration, channel: Channel) -> Step[Configuration] | None:
    """The enabled output on a channel, if any."""
    for step in enabled_config_steps(c):
        if step.action.channel == channel:
            return step
    return None


def step_config(c: Configuration, action: Action) -> Configuration:
    """Take a step of the configuration.

    Inputs go to every process. Outputs must be enabled at exactly one process, and every other
    process receives them.

    Raises:
        NotEnabledError: If an output is not enabled.

    """
    if action.is_input:
        return deliver(c, action)
    for step in enabled_config_steps(c):
        if step.action == action:
            return step.target
    raise NotEnabledError(f"{action} is not enabled")


def explore(
    c: Configuration,
    restrict: Callable[[Iterable[Action]], Trace] = env_restrict,
    limit: int = 200_000,
) -> frozenset[Trace]:
    """Restricted traces of every maximal run of the configuration's own steps.

    Only outputs and internal steps are scheduled; no input arrives from outside. States are memoised,
    so shared suffixes are explored once.

    Args:
        c: The starting configuration.
        restrict: Applied to each step's action; the environment restriction by default.
        limit: Upper bound on distinct states.

    Returns:
        The set of restricted traces.

    Raises:
        DeterminismViolationError: If a state breaks determinism.
        DepthExceededError: If the state space exceeds `limit`.

    """
    memo: dict[Configuration, frozenset[Trace]] = {}

    def suffixes(state: Configuration) -> frozenset[Trace]:
        cached = memo.get(state)
        if cached is not None:
            return cached
        if len(memo) >= limit:
            raise DepthExceededError(f"State space exceeds {limit} states")
        steps = enabled_config_steps(state)
        if not steps:
            result = frozenset({()})
        else:
            collected: set[Trace] = set()
            for step in steps:
                head = restrict((step.action,))
                collected.update(head + tail for tail in suffixes(step.target))
            result = frozenset(collected)
        memo[state] = result
        return result

    traces = suffixes(c)
    logger.debug("Explored %d states, %d distinct traces", len(memo), len(traces))
    return traces


def reachable(c: Configuration, limit: int = 10_000) -> Iterator[Configuration]:
    """Yield every configuration reachable by the configuration's own steps, breadth first."""
    seen = {c}
    frontier = deque([c])
    while frontier:
        if len(seen) > limit:
            logger.warning("Stopped exploring after %d states, %d left unvisited", limit, len(frontier))
            return
        state = frontier.popleft()
        yield state
        for step in enabled_config_steps(state):
            if step.target not in seen:
                seen.add(step.target)
                frontier.append(step.target)
