"""The configurations and simulator of every step of the compilation pipeline."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

from typing_extensions import assert_never

from secpart import Adversary
from secpart.adversary.simulators import (
    AsyncSimulator,
    CorruptionSimulator,
    HostSelectionSimulator,
    IdealExecutionSimulator,
    ProjectionSimulator,
    SequentializationSimulator,
)
from secpart.enums import SemanticsMode, Stage
from secpart.harness.runner import choreography_config, distributed_config, make_semantics, source_config
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment
from secpart.lang.ast import Stmt
from secpart.lang.values import DEFAULT_DOMAIN, Endpoint, Value
from secpart.semantics import Configuration, Semantics
from secpart.transform import corrupt_config, corrupt_stmt, partition, source_of

logger = logging.getLogger(__name__)

#: Wraps the adversary attacking the target into one attacking the source.
SimulatorBuilder = Callable[[Adversary], Adversary]


@dataclass(frozen=True)
class StagePlan:
    """Source and target of a pipeline step, and how to simulate the target's adversaries on the source."""

    #: The pipeline step.
    stage: Stage

    #: The configuration the simulator attacks.
    source: Configuration

    #: The configuration the adversary attacks.
    target: Configuration

    #: Builds a fresh simulator around a fresh adversary.
    simulator: SimulatorBuilder


class Pipeline:
    """Every configuration a checked choreography passes through, under one attack.

    Args:
        choreography: A choreography that passed validation.
        env: Host labels.
        attack: Which hosts the adversary controls.
        domain: Values the adversary may send.

    """

    def __init__(
        self,
        choreography: Stmt,
        env: HostEnvironment,
        attack: Attack = EMPTY_ATTACK,
        domain: tuple[Value, ...] = DEFAULT_DOMAIN,
    ) -> None:
        """Derive the source program, the corrupted choreography and the distributed program."""
        self.choreography = choreography
        self.env = env
        self.attack = attack
        self.domain = domain
        self.source_program = source_of(choreography)
        self.corrupted = corrupt_stmt(choreography, env, attack)
        self.distributed = corrupt_config(partition(choreography, env), env, attack)

    def _sem(self, mode: SemanticsMode, *, view: bool = False) -> Semantics:
        return make_semantics(mode, self.env, self.attack, self.domain, view=view)

    def source(self, *, view: bool = False) -> Configuration:
        """The source program, ideal and sequential."""
        return source_config(self.source_program, self._sem(SemanticsMode.IDEAL_SEQUENTIAL, view=view))

    def uncorrupted(self, *, view: bool = False) -> Configuration:
        """The choreography before corruption, speaking for every host, ideal and sequential."""
        hosts = [Endpoint.host(name) for name in self.env]
        return choreography_config(self.choreography, self._sem(SemanticsMode.IDEAL_SEQUENTIAL, view=view), hosts)

    def corrupt(self, mode: SemanticsMode, *, view: bool = False) -> Configuration:
        """The corrupted choreography under a stepping discipline."""
        return choreography_config(self.corrupted, self._sem(mode, view=view))

    def target(self) -> Configuration:
        """The distributed program of the hosts the attack does not control."""
        return distributed_config(self.distributed, self._sem(SemanticsMode.REAL_CONCURRENT))

    # ===== Simulators =====

    def hosts_simulator(self, inner: Adversary) -> Adversary:
        """Faces the source program, wraps an adversary of the sequential corrupted choreography.

        Corruption is simulated first, then host selection.
        """
        corrupted = self.corrupt(SemanticsMode.IDEAL_SEQUENTIAL, view=True)
        whole = self.uncorrupted(view=True)
        corruption = CorruptionSimulator(inner, view=corrupted, source=whole)
        return HostSelectionSimulator(corruption, view=whole, source=self.source(view=True))

    def seq_simulator(self, inner: Adversary) -> Adversary:
        """Faces the sequential corrupted choreography, wraps an adversary of its concurrent run."""
        return SequentializationSimulator(
            inner,
            view=self.corrupt(SemanticsMode.IDEAL_CONCURRENT, view=True),
            source=self.corrupt(SemanticsMode.IDEAL_SEQUENTIAL, view=True),
        )

    def ideal_simulator(self, inner: Adversary) -> IdealExecutionSimulator:
        """Faces the ideal concurrent corrupted choreography, wraps an adversary of its real run."""
        return IdealExecutionSimulator(
            inner,
            view=self.corrupt(SemanticsMode.SIMULATOR_VIEW),
            source=self.corrupt(SemanticsMode.IDEAL_CONCURRENT, view=True),
        )

    def async_simulator(self, inner: Adversary) -> Adversary:
        """Faces the real concurrent corrupted choreography, wraps an adversary of its asynchronous run."""
        return AsyncSimulator(inner, view=self.corrupt(SemanticsMode.ASYNC))

    def end_to_end_simulator(self, inner: Adversary) -> Adversary:
        """Every simulator in pipeline order, outermost facing the source program."""
        adversary: Adversary = ProjectionSimulator(inner)
        adversary = self.async_simulator(adversary)
        adversary = self.ideal_simulator(adversary)
        adversary = self.seq_simulator(adversary)
        return self.hosts_simulator(adversary)

    def plan(self, stage: Stage) -> StagePlan:
        """The source, target and simulator of a pipeline step."""
        match stage:
            case Stage.HOSTS:
                source = self.source()
                target = self.corrupt(SemanticsMode.IDEAL_SEQUENTIAL)
                builder: SimulatorBuilder = self.hosts_simulator
            case Stage.SEQ:
                source = self.corrupt(SemanticsMode.IDEAL_SEQUENTIAL)
                target = self.corrupt(SemanticsMode.IDEAL_CONCURRENT)
                builder = self.seq_simulator
            case Stage.IDEAL:
                source = self.corrupt(SemanticsMode.IDEAL_CONCURRENT)
                target = self.corrupt(SemanticsMode.REAL_CONCURRENT)
                builder = self.ideal_simulator
            case Stage.ASYNC:
                source = self.corrupt(SemanticsMode.REAL_CONCURRENT)
                target = self.corrupt(SemanticsMode.ASYNC)
                builder = self.async_simulator
            case Stage.PROJ:
                source = self.corrupt(SemanticsMode.ASYNC)
                target = self.target()
                builder = ProjectionSimulator
            case Stage.ALL:
                source = self.source()
                target = self.target()
                builder = self.end_to_end_simulator
            case _:
                assert_never(stage)
        logger.debug("Planned stage %s under attack %s", stage.value, self.attack)
        return StagePlan(stage, source, target, builder)


def build_stage(
    choreography: Stmt,
    env: HostEnvironment,
    attack: Attack = EMPTY_ATTACK,
    stage: Stage = Stage.ALL,
    domain: tuple[Value, ...] = DEFAULT_DOMAIN,
) -> StagePlan:
    """The source, target and simulator of one pipeline step for a choreography under an attack."""
    return Pipeline(choreography, env, attack, domain).plan(stage)
