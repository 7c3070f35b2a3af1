"""Simulation, functional correctness, projection bisimulation and robust preservation checks."""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from functools import partial
from typing import Any

from secpart.adversary.dummy import DummyAdversary
from secpart.adversary.family import adversary_family, emission_sites
from secpart.adversary.low_equivalence import low_equivalent
from secpart.adversary.monitor import InterfaceMonitor
from secpart.adversary.scripted import Script, ScriptedAdversary
from secpart.adversary.simulators import ProjectionSimulator, chain_divergence
from secpart.enums import LowView, Stage
from secpart.errors import DepthExceededError, SecpartError, ShapeMismatchError
from secpart.harness.runner import DEFAULT_ENV_DOMAIN, default_depth, env_input_assignments, run
from secpart.harness.stages import Pipeline, SimulatorBuilder
from secpart.labels import Attack, HostEnvironment, enumerate_attacks
from secpart.lang.ast import Stmt
from secpart.lang.values import DEFAULT_DOMAIN, Value
from secpart.semantics import (
    Action,
    Configuration,
    Trace,
    enabled_config_steps,
    env_restrict,
    explore,
    step_config,
    trace_to_json,
)
from secpart.transform import project_state, refines

logger = logging.getLogger(__name__)


# ===== Verdicts =====


def _inline(trace: Trace) -> str:
    return "; ".join(str(action) for action in trace)


@dataclass(frozen=True)
class Counterexample:
    """An adversary and environment inputs under which the two sides disagree."""

    #: The adversary attacking the target.
    script: Script

    #: The environment inputs, delivered up front.
    inputs: Trace

    #: Environment trace of the target.
    target_trace: Trace

    #: Environment trace of the source, attacked by the simulator.
    source_trace: Trace

    #: The first point where a simulator gave up, if one did.
    divergence: str | None = None

    @property
    def prefix(self) -> Trace:
        """The longest common prefix of both traces followed by the target's first differing action."""
        shared = 0
        for left, right in zip(self.target_trace, self.source_trace, strict=False):
            if left != right:
                break
            shared += 1
        return self.target_trace[: shared + 1]

    def describe(self) -> str:
        """Human-readable summary."""
        parts = [
            f"inputs [{_inline(self.inputs)}]",
            f"adversary [{'; '.join(str(t) for t in self.script.turns) or 'dummy'}]",
            f"target [{_inline(self.target_trace)}]",
            f"source [{_inline(self.source_trace)}]",
        ]
        if self.divergence:
            parts.append(f"simulator: {self.divergence}")
        return ", ".join(parts)

    def to_dict(self) -> dict[str, Any]:
        """Serialize for JSON reports."""
        return {
            "script": str(self.script),
            "inputs": trace_to_json(self.inputs),
            "target": trace_to_json(self.target_trace),
            "source": trace_to_json(self.source_trace),
            "divergence": self.divergence,
        }


@dataclass
class Verdict:
    """The outcome of one check."""

    #: What was checked: a stage name or a check name.
    stage: str

    #: The attack the check ran under, rendered.
    attack: str = ""

    #: Number of adversaries tried.
    adversaries: int = 0

    #: Number of runs compared.
    runs: int = 0

    #: The first disagreement found, shrunk.
    counterexample: Counterexample | None = None

    #: Failure description when there is no counterexample to show.
    failure: str | None = None

    @property
    def passed(self) -> bool:
        """Whether no disagreement was found."""
        return self.counterexample is None and self.failure is None

    @property
    def detail(self) -> str:
        """One line explaining a failure, empty when passed."""
        if self.counterexample is not None:
            return self.counterexample.describe()
        return self.failure or ""

    def to_dict(self) -> dict[str, Any]:
        """Serialize for JSON reports."""
        return {
            "stage": self.stage,
            "attack": self.attack,
            "adversaries": self.adversaries,
            "runs": self.runs,
            "passed": self.passed,
            "detail": self.detail,
            "counterexample": self.counterexample.to_dict() if self.counterexample else None,
        }


# ===== Simulation =====


def _run_depth(config: Configuration, script: Script, depth: int | None, modelled: Configuration | None = None) -> int:
    """The decision bound of a run; simulators also spend decisions on the configuration they model."""
    if depth is not None:
        return depth
    extra = len(script.turns) + 8 + (default_depth(modelled) if modelled is not None else 0)
    return default_depth(config, extra=extra)


def _compare(
    source: Configuration,
    target: Configuration,
    simulator: SimulatorBuilder,
    script: Script,
    inputs: Trace,
    depth: int | None,
) -> Counterexample | None:
    target_trace = run(target, ScriptedAdversary(script), inputs, _run_depth(target, script, depth)).env_trace
    sem = source.semantics
    wrapped = simulator(ScriptedAdversary(script))
    try:
        monitored = InterfaceMonitor(wrapped, sem.env, sem.attack)
        result = run(source, monitored, inputs, _run_depth(source, script, depth, target))
    except DepthExceededError:
        raise
    except SecpartError as exc:
        reason = chain_divergence(wrapped) or f"{type(exc).__name__}: {exc}"
        return Counterexample(script, inputs, target_trace, env_restrict(inputs), reason)
    if result.env_trace == target_trace:
        return None
    return Counterexample(script, inputs, target_trace, result.env_trace, chain_divergence(wrapped))


def _shrink(
    found: Counterexample,
    fails: Callable[[Script, Trace], Counterexample | None],
    env_domain: Sequence[Value],
) -> Counterexample:
    """Smaller inputs first, then fewer adversary turns, until nothing shrinks further."""
    best = found
    improved = True
    while improved:
        improved = False
        for index, action in enumerate(best.inputs):
            position = env_domain.index(action.message.value) if action.message.value in env_domain else 0
            for value in env_domain[:position]:
                message = action.message
                replaced = Action.receive(message.sender, message.receiver, value)
                inputs = (*best.inputs[:index], replaced, *best.inputs[index + 1 :])
                smaller = fails(best.script, inputs)
                if smaller is not None:
                    best, improved = smaller, True
                    break
        for index in reversed(range(len(best.script.turns))):
            turns = best.script.turns[:index] + best.script.turns[index + 1 :]
            smaller = fails(Script(turns, best.script.fallback), best.inputs)
            if smaller is not None:
                best, improved = smaller, True
                break
    return best


def check_simulation(
    source: Configuration,
    target: Configuration,
    family: Iterable[Script],
    simulator: SimulatorBuilder,
    env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN,
    depth: int | None = None,
    stage: str = "custom",
) -> Verdict:
    """Check that every adversary of the target is matched by its simulator on the source.

    Environment inputs appear in environment traces, so comparing runs input by input compares the trace sets.

    Args:
        source: The configuration the simulator attacks.
        target: The configuration the adversaries attack.
        family: The adversaries, as scripts.
        simulator: Builds the simulator around an adversary of the target.
        env_domain: Values the environment feeds to input sites.
        depth: Decision bound per run; derived from each configuration when omitted.
        stage: Name recorded in the verdict.

    Returns:
        The verdict, with the first counterexample shrunk.

    Raises:
        DepthExceededError: If a run does not quiesce within its bound.

    """
    verdict = Verdict(stage, str(target.semantics.attack))
    assignments = list(env_input_assignments(source, env_domain))

    def fails(script: Script, inputs: Trace) -> Counterexample | None:
        return _compare(source, target, simulator, script, inputs, depth)

    for script in family:
        verdict.adversaries += 1
        for inputs in assignments:
            verdict.runs += 1
            found = fails(script, inputs)
            if found is not None:
                verdict.counterexample = _shrink(found, fails, env_domain)
                logger.info("Stage %s fails after %d runs: %s", stage, verdict.runs, verdict.detail)
                return verdict
    logger.info("Stage %s passes: %d adversaries, %d runs", stage, verdict.adversaries, verdict.runs)
    return verdict


def stage_family(config: Configuration, depth: int = 6, branching: int = 2) -> list[Script]:
    """The adversary family attacking a configuration: its emission sites, scheduled up to `depth`."""
    return list(adversary_family(emission_sites(config), depth, branching))


def check_stage(
    pipeline: Pipeline,
    stage: Stage,
    env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN,
    depth: int = 6,
    branching: int = 2,
    run_depth: int | None = None,
) -> Verdict:
    """Run the simulation check of one pipeline step against its default adversary family."""
    plan = pipeline.plan(stage)
    family = stage_family(plan.target, depth, branching)
    return check_simulation(plan.source, plan.target, family, plan.simulator, env_domain, run_depth, stage.value)


def simulation_suite(
    choreography: Stmt,
    env: HostEnvironment,
    attacks: Iterable[Attack],
    stages: Sequence[Stage] = (Stage.ALL,),
    domain: tuple[Value, ...] = DEFAULT_DOMAIN,
    env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN,
    depth: int = 6,
    branching: int = 2,
) -> list[Verdict]:
    """Check the given pipeline steps of a choreography under every attack."""
    verdicts = []
    for attack in attacks:
        pipeline = Pipeline(choreography, env, attack, domain)
        for stage in stages:
            verdicts.append(check_stage(pipeline, stage, env_domain, depth, branching))
    return verdicts


# ===== Robust preservation =====


def check_rhp(
    source: Configuration,
    compile_fn: Callable[[Configuration], Configuration],
    contexts: Iterable[Script],
    simulator: SimulatorBuilder = ProjectionSimulator,
    env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN,
    depth: int | None = None,
) -> Verdict:
    """Check robust preservation: every target context has a source context with the same behavior.

    The source context of a target context is the simulator built around it, and behavior is the set of
    environment traces.
    """
    return check_simulation(source, compile_fn(source), contexts, simulator, env_domain, depth, "rhp")


def rhp_suite(
    choreography: Stmt,
    env: HostEnvironment,
    domain: tuple[Value, ...] = DEFAULT_DOMAIN,
    env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN,
    depth: int = 6,
    branching: int = 2,
) -> list[Verdict]:
    """Check robust preservation of the whole pipeline under every valid attack over the hosts' atoms."""
    verdicts = []
    for attack in enumerate_attacks(sorted(env.atoms)):
        pipeline = Pipeline(choreography, env, attack, domain)
        target = pipeline.target()
        verdict = check_rhp(
            pipeline.source(),
            lambda _, built=target: built,
            stage_family(target, depth, branching),
            pipeline.end_to_end_simulator,
            env_domain,
        )
        verdicts.append(verdict)
    return verdicts


# ===== Functional correctness =====


def check_functional(
    source: Configuration,
    target: Configuration,
    env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN,
) -> Verdict:
    """Check that every schedule of the target yields exactly the source's environment trace.

    Nothing is forged: only the configurations' own steps are scheduled.
    """
    verdict = Verdict("functional", str(target.semantics.attack), adversaries=1)
    for inputs in env_input_assignments(source, env_domain):
        verdict.runs += 1
        expected = run(source, DummyAdversary(), inputs).env_trace
        started = target
        for action in inputs:
            started = step_config(started, action)
        prefix = env_restrict(inputs)
        traces = {prefix + suffix for suffix in explore(started)}
        if traces != {expected}:
            other = next(iter(t for t in sorted(traces, key=str) if t != expected), expected)
            verdict.counterexample = Counterexample(Script(), inputs, other, expected)
            logger.info("Functional check fails: %s", verdict.detail)
            return verdict
    return verdict


# ===== Projection bisimulation =====


def _projects_to(choreography: Configuration, distributed: Configuration) -> bool:
    """Whether every host process of `distributed` refines the projection of the choreography's state."""
    (process,) = choreography.processes
    for host_process in distributed.processes:
        (host,) = host_process.hosts
        projected = project_state(process.stmt, process.buffer, host)
        if not refines(projected.stmt, host_process.stmt) or projected.buffer != host_process.buffer:
            return False
    return True


def check_bisimulation(
    choreography: Configuration,
    distributed: Configuration,
    env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN,
    limit: int = 50_000,
) -> Verdict:
    """Check that an asynchronous choreography and its projection match each other action for action.

    Both are explored in lockstep from every environment input choice. Every pair of states reached must
    offer the same actions, and the projection of the choreography's state must be refined by the
    distributed state, which may carry extra `case` branches.
    """
    verdict = Verdict("bisimulation", str(choreography.semantics.attack), adversaries=1)
    for inputs in env_input_assignments(choreography, env_domain):
        verdict.runs += 1
        start_c, start_d = choreography, distributed
        for action in inputs:
            start_c, start_d = step_config(start_c, action), step_config(start_d, action)
        seen = {(start_c, start_d)}
        frontier = deque([(start_c, start_d, inputs)])
        while frontier:
            state_c, state_d, path = frontier.popleft()
            if not _projects_to(state_c, state_d):
                verdict.failure = f"after [{_inline(path)}] the distributed state is not a projection"
                return verdict
            steps_c = enabled_config_steps(state_c)
            steps_d = enabled_config_steps(state_d)
            actions_c = {s.action for s in steps_c}
            actions_d = {s.action for s in steps_d}
            if actions_c != actions_d:
                only_c = sorted(str(a) for a in actions_c - actions_d)
                only_d = sorted(str(a) for a in actions_d - actions_c)
                verdict.failure = (
                    f"after [{_inline(path)}] choreography alone offers {only_c}, projection alone offers {only_d}"
                )
                return verdict
            for step_c in steps_c:
                matches = [s.target for s in steps_d if s.action == step_c.action]
                related = [t for t in matches if _projects_to(step_c.target, t)] or matches[:1]
                for next_d in related:
                    pair = (step_c.target, next_d)
                    if pair not in seen:
                        if len(seen) >= limit:
                            verdict.failure = f"state space exceeds {limit} pairs"
                            return verdict
                        seen.add(pair)
                        frontier.append((*pair, (*path, step_c.action)))
    logger.info("Bisimulation holds over %d input choices", verdict.runs)
    return verdict


# ===== Simulator invariants =====


def _record_statements(into: list[tuple[Stmt, ...]], config: Configuration) -> None:
    into.append(tuple(p.stmt for p in config.processes))


def _public_equivalent(
    modelled: tuple[Stmt, ...], actual: tuple[Stmt, ...], env: HostEnvironment, attack: Attack
) -> bool:
    try:
        return all(low_equivalent(m, a, LowView.PUBLIC, env, attack) for m, a in zip(modelled, actual, strict=True))
    except ShapeMismatchError:
        return False


def check_view_equivalence(
    pipeline: Pipeline,
    family: Iterable[Script],
    env_domain: Sequence[Value] = DEFAULT_ENV_DOMAIN,
    depth: int | None = None,
) -> Verdict:
    """Check that the ideal-execution simulator's view stays public-equivalent to the real run it models.

    The real corrupted choreography and the simulator are driven by the same adversary. After every output
    the adversary accepts, the statement of the real run and of the simulator's view must agree on every
    public value.
    """
    plan = pipeline.plan(Stage.IDEAL)
    verdict = Verdict("view", str(pipeline.attack))
    env, attack = pipeline.env, pipeline.attack
    for script in family:
        verdict.adversaries += 1
        for inputs in env_input_assignments(plan.source, env_domain):
            verdict.runs += 1
            real: list[tuple[Stmt, ...]] = []
            run(
                plan.target,
                ScriptedAdversary(script),
                inputs,
                _run_depth(plan.target, script, depth),
                on_step=partial(_record_statements, real),
            )
            simulator = pipeline.ideal_simulator(ScriptedAdversary(script))
            run(plan.source, simulator, inputs, _run_depth(plan.source, script, depth, plan.target))
            for index, (modelled, actual) in enumerate(zip(simulator.snapshots, real, strict=False)):
                if not _public_equivalent(modelled, actual, env, attack):
                    reason = f"view differs from the real run after step {index + 1}"
                    verdict.counterexample = Counterexample(script, inputs, (), (), reason)
                    return verdict
    return verdict
