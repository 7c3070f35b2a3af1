"""Configurations of each pipeline tier, single adversarial runs and environment trace sets."""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field

from secpart import Accept, Adversary, Decision, Emit, Halt
from secpart.adversary.redaction import Redactor
from secpart.adversary.scripted import emission_problem
from secpart.enums import SemanticsMode
from secpart.errors import DepthExceededError, InterfaceViolationError
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment
from secpart.lang.analysis import input_sites, statement_count
from secpart.lang.ast import Stmt
from secpart.lang.values import DEFAULT_DOMAIN, ENVIRONMENT, IDEAL, Endpoint, IntValue, Value
from secpart.semantics import (
    Action,
    Configuration,
    ProcessState,
    Semantics,
    Trace,
    env_restrict,
    output_on,
    ready_channels,
    step_config,
)
from secpart.transform.projection import DistributedProgram

logger = logging.getLogger(__name__)

#: Values the environment feeds to input sites by default.
DEFAULT_ENV_DOMAIN: tuple[Value, ...] = (IntValue(0), IntValue(1), IntValue(2))

#: Builds a fresh adversary for every run; adversaries are single-use.
AdversaryFactory = Callable[[], Adversary]


def make_semantics(
    mode: SemanticsMode,
    env: HostEnvironment,
    attack: Attack = EMPTY_ATTACK,
    domain: tuple[Value, ...] = DEFAULT_DOMAIN,
    *,
    view: bool = False,
) -> Semantics:
    """Semantics for one configuration of the pipeline."""
    return Semantics(mode, env, attack, domain, view=view)


def nonmalicious_hosts(env: HostEnvironment, attack: Attack) -> list[Endpoint]:
    """Declared hosts the attack does not control, in declaration order."""
    return [Endpoint.host(name) for name in env if not env.is_malicious(name, attack)]


def source_config(program: Stmt, sem: Semantics) -> Configuration:
    """A source program as one process speaking for the ideal host and every declared host."""
    hosts = [IDEAL, *(Endpoint.host(name) for name in sem.env)]
    return Configuration((ProcessState.of(hosts, program),), sem)


def choreography_config(
    choreography: Stmt,
    sem: Semantics,
    hosts: Iterable[Endpoint] | None = None,
) -> Configuration:
    """A choreography as one process.

    By default the process speaks for the hosts the attack does not control, so that messages forged by
    malicious hosts arrive from outside. Uncorrupted choreographies pass every declared host.
    """
    if hosts is None:
        hosts = nonmalicious_hosts(sem.env, sem.attack)
    return Configuration((ProcessState.of(hosts, choreography),), sem)


def distributed_config(program: DistributedProgram, sem: Semantics) -> Configuration:
    """A distributed program as one process per host, with its pre-loaded buffer."""
    processes = tuple(
        ProcessState.of([Endpoint.host(host)], hosted.stmt, hosted.buffer) for host, hosted in program.programs.items()
    )
    return Configuration(processes, sem)


def default_depth(config: Configuration, extra: int = 0) -> int:
    """Decision bound for runs of a configuration: four per statement plus buffered messages plus `extra`."""
    statements = sum(statement_count(p.stmt) for p in config.processes)
    buffered = sum(len(p.buffer) for p in config.processes)
    return 4 * statements + buffered + extra


# ===== Environment inputs =====


def config_input_sites(config: Configuration) -> Counter[Endpoint]:
    """How many inputs each host of a configuration may read."""
    total: Counter[Endpoint] = Counter()
    for process in config.processes:
        total += input_sites(process.stmt)
    return total


def env_input_assignments(config: Configuration, env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN) -> Iterator[Trace]:
    """Every way of feeding the configuration's input sites from the environment.

    Hosts are fed in declaration order, one message per input site. Malicious hosts read no input.
    """
    sem = config.semantics
    sites = config_input_sites(config)
    receivers = [
        host
        for name in sem.env
        if (host := Endpoint.host(name)) in sites and not sem.env.is_malicious(name, sem.attack)
        for _ in range(sites[host])
    ]
    for values in itertools.product(env_domain, repeat=len(receivers)):
        yield tuple(Action.receive(ENVIRONMENT, host, value) for host, value in zip(receivers, values, strict=True))


# ===== Runs =====


@dataclass
class RunResult:
    """One run of an adversary against a configuration."""

    #: Every action of the run, inputs included.
    trace: list[Action] = field(default_factory=list)

    #: The configuration when the run ended.
    final: Configuration | None = None

    #: Number of decisions the adversary took.
    decisions: int = 0

    #: Whether the adversary halted while the configuration could still step.
    halted_early: bool = False

    @property
    def env_trace(self) -> Trace:
        """The trace restricted to actions touching the environment."""
        return env_restrict(self.trace)


def run(
    config: Configuration,
    adversary: Adversary,
    inputs: Iterable[Action] = (),
    depth: int | None = None,
    on_step: Callable[[Configuration], None] | None = None,
) -> RunResult:
    """Run an adversary against a configuration until it halts.

    Environment inputs are delivered first, and the adversary observes each one, redacted. Then the adversary
    decides repeatedly: accepted outputs are taken and observed, emissions are delivered without echo.

    Args:
        config: The starting configuration.
        adversary: A fresh adversary.
        inputs: Environment inputs, delivered before the first decision.
        depth: Maximum number of decisions; `default_depth` when omitted.
        on_step: Called with the new configuration after every accepted output.

    Returns:
        The run.

    Raises:
        DepthExceededError: If the adversary has not halted after `depth` decisions.
        InterfaceViolationError: If the adversary accepts a channel that is not ready or forges a message it may not.

    """
    sem = config.semantics
    redactor = Redactor(sem.env, sem.attack)
    limit = default_depth(config, extra=8) if depth is None else depth
    result = RunResult()
    for action in inputs:
        config = step_config(config, action)
        result.trace.append(action)
        adversary.observe(redactor.observe(action))
    for _ in range(limit):
        ready = ready_channels(config)
        decision: Decision = adversary.decide(ready)
        result.decisions += 1
        match decision:
            case Halt():
                result.final = config
                result.halted_early = bool(ready)
                return result
            case Emit(message=message):
                problem = emission_problem(message, sem.env, sem.attack)
                if problem is not None:
                    raise InterfaceViolationError(f"Cannot emit {message}: {problem}")
                action = Action.receive(message.sender, message.receiver, message.value)
                config = step_config(config, action)
                result.trace.append(action)
            case Accept(channel=channel):
                step = output_on(config, channel)
                if step is None:
                    raise InterfaceViolationError(f"{channel} is not ready")
                config = step.target
                result.trace.append(step.action)
                adversary.observe(redactor.observe(step.action))
                if on_step is not None:
                    on_step(config)
    raise DepthExceededError(f"Adversary did not halt within {limit} decisions")


def trace_set(
    config: Configuration,
    adversary: AdversaryFactory,
    env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN,
    depth: int | None = None,
) -> frozenset[Trace]:
    """Environment traces of a fixed adversary against every environment input choice.

    Raises:
        DepthExceededError: If some run does not quiesce within `depth` decisions.

    """
    traces = frozenset(
        run(config, adversary(), inputs, depth).env_trace for inputs in env_input_assignments(config, env_domain)
    )
    logger.debug("Collected %d environment traces", len(traces))
    return traces
