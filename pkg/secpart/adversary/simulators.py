"""Simulators: adversaries facing the source side of a compilation step, built around one facing the target.

Each simulator runs the wrapped adversary "in its head" against a model of the target configuration, feeding
it the channels and observations the real target would produce, and schedules the source configuration so
that the environment sees the same actions. Models never learn redacted payloads: those become `Opaque`.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Generator, Sequence
from dataclasses import dataclass

from secpart import HALT, Accept, Adversary, Decision, Emit, Halt, Observation, Simulator
from secpart.adversary.redaction import Redactor
from secpart.enums import Direction, SemanticsMode
from secpart.errors import ModeMismatchError
from secpart.lang.ast import Stmt
from secpart.lang.values import ADVERSARY, ENVIRONMENT, IDEAL, UNIT, Channel, Endpoint, Opaque, Value
from secpart.semantics.actions import Action, Demand, Message, Step, base_rule
from secpart.semantics.configuration import Configuration, deliver, enabled_config_steps, output_on
from secpart.semantics.statements import stmt_moves

logger = logging.getLogger(__name__)

#: Decisions yielded to the source side; the generator's return value is the result of the sub-protocol.
Play = Generator[Decision, None, None]

#: Rules of the run-time receive steps, which have no counterpart once communication is synchronous.
RECEIVE_RULES = frozenset({"S-Communicate-Receive", "S-Select-Receive"})


def leak_hosts(config: Configuration) -> list[Endpoint]:
    """Hosts waiting for the value of a flipped declassification that has not arrived yet, sorted."""
    hosts: set[Endpoint] = set()
    for process in config.processes:
        for move in stmt_moves(config.semantics, process.stmt):
            if (
                isinstance(move, Demand)
                and move.channel.receiver == ADVERSARY
                and process.buffer.front(move.channel) is None
            ):
                hosts.add(move.channel.sender)
    return sorted(hosts)


def _adversary_demands(config: Configuration) -> list[Channel]:
    """Channels from the adversary that some statement reads but whose buffer is empty, sorted."""
    channels: set[Channel] = set()
    for process in config.processes:
        for move in stmt_moves(config.semantics, process.stmt):
            if (
                isinstance(move, Demand)
                and move.channel.sender == ADVERSARY
                and process.buffer.front(move.channel) is None
            ):
                channels.add(move.channel)
    return sorted(channels)


def chain_divergence(adversary: Adversary) -> str | None:
    """The divergence recorded by the outermost simulator of a composition that met one."""
    current: Adversary | None = adversary
    while isinstance(current, Simulator):
        if current.divergence is not None:
            return f"{type(current).__name__}: {current.divergence}"
        current = current.inner
    return None


class _ModelSimulator(Simulator):
    """Plumbing shared by simulators that replay a generator of decisions.

    `decide` resumes the generator with the current ready channels; `observe` queues observations of the
    source side for the generator to consume after an accept.
    """

    def __init__(self, inner: Adversary, redactor: Redactor) -> None:
        """Initialize before the first decision."""
        super().__init__(inner)
        self.redactor = redactor
        self.steps = 0
        self._ready: list[Channel] = []
        self._seen: deque[Observation] = deque()
        self._game: Play | None = None

    def decide(self, ready: Sequence[Channel]) -> Decision:
        """Resume the simulation until it needs the source side to act."""
        self._ready = list(ready)
        if self._game is None:
            self._game = self._play()
        try:
            return next(self._game)
        except StopIteration:
            return HALT

    def observe(self, observation: Observation) -> None:
        """Queue an observation of the source side."""
        self._seen.append(observation)

    def _play(self) -> Play:
        raise NotImplementedError

    def _inputs(self) -> list[Observation]:
        """Pop the environment inputs delivered before the first decision."""
        inputs = []
        while self._seen and self._seen[0].direction is Direction.INPUT:
            if self._seen[0].channel.sender != ENVIRONMENT:
                break
            inputs.append(self._seen.popleft())
        return inputs

    @staticmethod
    def _input_action(observation: Observation) -> Action:
        channel = observation.channel
        value = observation.value if observation.value is not None else Opaque(channel.receiver.name)
        return Action.receive(channel.sender, channel.receiver, value)

    def _accept(self, channel: Channel) -> Generator[Decision, None, Observation | None]:
        """Accept a channel of the source side and return what was observed, or `None` if it is not ready."""
        if channel not in self._ready:
            self.diverge(f"{channel} is not ready on the source side (ready: {[str(c) for c in self._ready]})")
            return None
        yield Accept(channel)
        if not self._seen or self._seen[0].channel != channel:
            self.diverge(f"accepted {channel} but observed {self._seen[0] if self._seen else 'nothing'}")
            return None
        return self._seen.popleft()

    def _tell(self, observation: Observation) -> None:
        self.steps += 1
        logger.debug("%s shows step %d: %s", type(self).__name__, self.steps, observation)
        if isinstance(observation.value, Opaque):
            self.diverge(f"cannot compute the visible payload of {observation.channel}")
        self.inner.observe(observation)


@dataclass(frozen=True)
class _Offer:
    """A channel the model presents to the wrapped adversary and how to take it."""

    #: The model step, or `None` for a declassification still waiting for its value.
    step: Step[Configuration] | None

    #: The host of a flipped downgrade, if the offer is one.
    host: Endpoint | None = None


class ViewSimulator(_ModelSimulator):
    """Runs the wrapped adversary against a view of the target and drives a model of the source lazily.

    The source model is only scheduled when the view does something the environment or the adversary can
    tell apart: an environment output, a declassification or an endorsement. Until then it takes filler
    steps that are invisible to both.

    Args:
        inner: The adversary attacking the target.
        view: The target configuration as the simulator can model it, declassifications flipped.
        source: The source configuration as the simulator can model it, declassifications flipped.
        rename: Host of the source side performing every downgrade, if it differs from the target's.
        filler: Value written to adversary inputs the target never reads.
        patience: Filler steps allowed before giving up on reaching a goal.

    """

    def __init__(
        self,
        inner: Adversary,
        view: Configuration,
        source: Configuration,
        rename: Endpoint | None = None,
        filler: Value = UNIT,
        patience: int = 10_000,
    ) -> None:
        """Initialize the simulator."""
        super().__init__(inner, Redactor(view.semantics.env, view.semantics.attack))
        self.view = view
        self.source = source
        self.rename = rename
        self.filler = filler
        self.patience = patience
        self.snapshots: list[tuple[Stmt, ...]] = []

    @property
    def real_view(self) -> bool:
        """Whether the target runs the real rules, so downgrades look internal to the adversary."""
        return self.view.semantics.mode is SemanticsMode.SIMULATOR_VIEW

    def _host(self, host: Endpoint) -> Endpoint:
        return self.rename or host

    def presented(self) -> dict[Channel, _Offer]:
        """The channels the target would offer, mapped to the view moves that produce them."""
        offers: dict[Channel, _Offer] = {}
        for step in enabled_config_steps(self.view):
            if base_rule(step.rule) == "E-Endorse-View":
                offers[Channel(step.host, step.host)] = _Offer(step, step.host)
            else:
                offers[step.action.channel] = _Offer(step)
        for host in leak_hosts(self.view):
            channel = Channel(host, host) if self.real_view else Channel(host, ADVERSARY)
            offers[channel] = _Offer(None, host)
        return offers

    def _play(self) -> Play:
        for observation in self._inputs():
            action = self._input_action(observation)
            self.view = deliver(self.view, action)
            self.source = deliver(self.source, action)
            self.inner.observe(observation)
        while True:
            offers = self.presented()
            decision = self.inner.decide(sorted(offers))
            match decision:
                case Halt():
                    yield HALT
                    return
                case Emit(message=message):
                    self.view = deliver(self.view, Action.receive(message.sender, message.receiver, message.value))
                case Accept(channel=channel):
                    offer = offers.get(channel)
                    if offer is None:
                        self.diverge(f"wrapped adversary accepted {channel}, which the target does not offer")
                        yield HALT
                        return
                    observation = yield from self._mirror(channel, offer)
                    if observation is None:
                        yield HALT
                        return
                    self._tell(observation)
                    self.snapshots.append(tuple(p.stmt for p in self.view.processes))

    def _mirror(self, channel: Channel, offer: _Offer) -> Generator[Decision, None, Observation | None]:
        step = offer.step
        if step is None:
            assert offer.host is not None
            return (yield from self._leak(offer.host))
        if base_rule(step.rule) == "E-Endorse-View":
            if not (yield from self._endorse(step.host, step.action.message.value)):
                return None
            self.view = step.target
            return self.redactor.observe(Action.internal(step.host))
        consumed = step.consumed
        if consumed is not None and consumed.sender == ADVERSARY:
            if not (yield from self._endorse(step.host, consumed.value)):
                return None
            self.view = step.target
            return self.redactor.observe(step.action)
        if channel.receiver == ENVIRONMENT:
            seen = yield from self._drive(lambda model: channel if output_on(model, channel) is not None else None)
            if seen is None:
                return None
            self.view = step.target
            return Observation(Direction.OUTPUT, channel, seen.value)
        self.view = step.target
        return self.redactor.observe(step.action)

    def _leak(self, host: Endpoint) -> Generator[Decision, None, Observation | None]:
        """Obtain a declassified value from the source side and hand it to the view."""
        leaking = self._host(host)
        goal = Channel(leaking, ADVERSARY)
        seen = yield from self._drive(lambda model: goal if leaking in leak_hosts(model) else None)
        if seen is None:
            return None
        value = seen.value if seen.value is not None else Opaque(leaking.name)
        self.view = deliver(self.view, Action.receive(host, ADVERSARY, value))
        fed = output_on(self.view, Channel(host, host))
        if fed is None:
            self.diverge(f"view cannot consume the value declassified at {host}")
            return None
        self.view = fed.target
        if self.real_view:
            return self.redactor.observe(Action.internal(host))
        return self.redactor.observe(Action.send(host, ADVERSARY, value))

    def _endorse(self, host: Endpoint, value: Value) -> Generator[Decision, None, bool]:
        """Write an endorsed value to the source side and schedule it until the value is read."""
        channel = Channel(ADVERSARY, self._host(host))
        yield Emit(Message(channel.sender, channel.receiver, value))
        self.source = deliver(self.source, Action.receive(channel.sender, channel.receiver, value))

        def reader(model: Configuration) -> Channel | None:
            for step in enabled_config_steps(model):
                if step.consumed is not None and step.consumed.channel == channel:
                    return step.action.channel
            return None

        return (yield from self._drive(reader)) is not None

    def _drive(self, goal: Callable[[Configuration], Channel | None]) -> Generator[Decision, None, Observation | None]:
        """Schedule the source side with filler steps until `goal` names a channel, then accept it."""
        for _ in range(self.patience):
            target = goal(self.source)
            if target is not None:
                return (yield from self._take(target))
            filler = self._filler()
            if isinstance(filler, Channel):
                if (yield from self._take(filler)) is None:
                    return None
            elif isinstance(filler, Message):
                yield Emit(filler)
                self.source = deliver(self.source, Action.receive(filler.sender, filler.receiver, filler.value))
            else:
                self.diverge("source side is stuck before reaching the step the target took")
                return None
        self.diverge(f"source side did not reach the step within {self.patience} steps")
        return None

    def _take(self, channel: Channel) -> Generator[Decision, None, Observation | None]:
        seen = yield from self._accept(channel)
        if seen is None:
            return None
        if channel.receiver == ADVERSARY:
            value = seen.value if seen.value is not None else Opaque(channel.sender.name)
            self.source = deliver(self.source, Action.receive(channel.sender, ADVERSARY, value))
            channel = Channel(channel.sender, channel.sender)
        step = output_on(self.source, channel)
        if step is None:
            self.diverge(f"source model cannot follow {channel}")
            return None
        self.source = step.target
        return seen

    def _filler(self) -> Channel | Message | None:
        """A source step invisible to the environment, or an input the source needs that nobody else supplies."""
        sem = self.source.semantics
        candidates: list[Channel] = []
        for step in enabled_config_steps(self.source):
            if step.action.channel.receiver == ENVIRONMENT:
                continue
            if step.consumed is not None and step.consumed.sender == ADVERSARY and not sem.is_malicious(step.host):
                continue
            candidates.append(step.action.channel)
        candidates.extend(Channel(h, ADVERSARY) for h in leak_hosts(self.source) if sem.is_malicious(h))
        if candidates:
            return min(candidates)
        for channel in _adversary_demands(self.source):
            if sem.is_malicious(channel.receiver):
                return Message(ADVERSARY, channel.receiver, self.filler)
        return None


def _expect_modes(simulator: str, view: Configuration, source: Configuration, modes: tuple[SemanticsMode, ...]) -> None:
    """Raise unless the view and the source run the two given disciplines."""
    found = (view.semantics.mode, source.semantics.mode)
    if found != modes:
        raise ModeMismatchError(
            f"{simulator} expects a {modes[0].name} view and a {modes[1].name} source, "
            f"got {found[0].name} and {found[1].name}"
        )


class HostSelectionSimulator(ViewSimulator):
    """Faces the source program while the wrapped adversary attacks the choreography.

    Downgrades of the choreography, at whichever host, happen at the ideal host of the source program.
    """

    def __init__(self, inner: Adversary, view: Configuration, source: Configuration, patience: int = 10_000) -> None:
        """Initialize the simulator; both sides run ideal and sequential."""
        _expect_modes(type(self).__name__, view, source, (SemanticsMode.IDEAL_SEQUENTIAL,) * 2)
        super().__init__(inner, view, source, rename=IDEAL, patience=patience)


class CorruptionSimulator(ViewSimulator):
    """Faces the choreography while the wrapped adversary attacks its corrupted version.

    Statements of malicious hosts have no counterpart in the view; they are scheduled as filler steps.
    Adversary inputs the view never reads are filled with `filler`.
    """

    def __init__(
        self,
        inner: Adversary,
        view: Configuration,
        source: Configuration,
        filler: Value = UNIT,
        patience: int = 10_000,
    ) -> None:
        """Initialize the simulator; both sides run ideal and sequential, downgrades stay at their hosts."""
        _expect_modes(type(self).__name__, view, source, (SemanticsMode.IDEAL_SEQUENTIAL,) * 2)
        super().__init__(inner, view, source, filler=filler, patience=patience)


class SequentializationSimulator(ViewSimulator):
    """Faces the sequential corrupted choreography while the wrapped adversary attacks its concurrent run.

    Internal steps and inputs are not mirrored; the sequential process is scheduled until it performs the
    same visible output.
    """

    def __init__(self, inner: Adversary, view: Configuration, source: Configuration, patience: int = 10_000) -> None:
        """Initialize the simulator with a concurrent view of a sequential source."""
        _expect_modes(
            type(self).__name__, view, source, (SemanticsMode.IDEAL_CONCURRENT, SemanticsMode.IDEAL_SEQUENTIAL)
        )
        super().__init__(inner, view, source, patience=patience)


class IdealExecutionSimulator(ViewSimulator):
    """Faces the ideal corrupted choreography while the wrapped adversary attacks its real run.

    The view flips both downgrades: declassified values come from the ideal side, endorsed values are
    computed in the view and written to the ideal side.
    """

    def __init__(self, inner: Adversary, view: Configuration, source: Configuration, patience: int = 10_000) -> None:
        """Initialize the simulator with a flipped real view of an ideal concurrent source."""
        _expect_modes(
            type(self).__name__, view, source, (SemanticsMode.SIMULATOR_VIEW, SemanticsMode.IDEAL_CONCURRENT)
        )
        super().__init__(inner, view, source, patience=patience)


class AsyncSimulator(_ModelSimulator):
    """Faces the real concurrent corrupted choreography while the wrapped adversary attacks its asynchronous run.

    Every step of the asynchronous model except the run-time receives is taken on the source side at once.
    Emissions go to both.

    Args:
        inner: The adversary attacking the asynchronous target.
        view: The target configuration as the simulator can model it.

    """

    def __init__(self, inner: Adversary, view: Configuration) -> None:
        """Initialize the simulator."""
        super().__init__(inner, Redactor(view.semantics.env, view.semantics.attack))
        self.view = view

    def _play(self) -> Play:
        for observation in self._inputs():
            self.view = deliver(self.view, self._input_action(observation))
            self.inner.observe(observation)
        while True:
            steps = {step.action.channel: step for step in enabled_config_steps(self.view)}
            decision = self.inner.decide(sorted(steps))
            match decision:
                case Halt():
                    yield HALT
                    return
                case Emit(message=message):
                    self.view = deliver(self.view, Action.receive(message.sender, message.receiver, message.value))
                    yield decision
                case Accept(channel=channel):
                    step = steps.get(channel)
                    if step is None:
                        self.diverge(f"wrapped adversary accepted {channel}, which the target does not offer")
                        yield HALT
                        return
                    if base_rule(step.rule) in RECEIVE_RULES:
                        observation = self.redactor.observe(step.action)
                    else:
                        seen = yield from self._accept(channel)
                        if seen is None:
                            yield HALT
                            return
                        observation = Observation(seen.direction, channel, seen.value)
                    self.view = step.target
                    self._tell(observation)


class ProjectionSimulator(Simulator):
    """Faces the asynchronous choreography while the wrapped adversary attacks its projection: the identity."""

    def decide(self, ready: Sequence[Channel]) -> Decision:
        """Ask the wrapped adversary."""
        return self.inner.decide(ready)

    def observe(self, observation: Observation) -> None:
        """Pass the observation on."""
        self.inner.observe(observation)
