"""Tests for the labeled transition system."""

import logging
from pathlib import Path

import pytest

from secpart.checking import check_stmt
from secpart.enums import SemanticsMode
from secpart.errors import (
    DepthExceededError,
    DeterminismViolationError,
    HostEnvironmentError,
    NotEnabledError,
    StuckBranchError,
)
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment
from secpart.lang import (
    ADVERSARY,
    DEFAULT_DOMAIN,
    ENVIRONMENT,
    FALSE,
    SKIP,
    TRUE,
    UNIT,
    AtomExpr,
    Channel,
    Endpoint,
    If,
    IntValue,
    Let,
    MovePending,
    Output,
    Stmt,
    Var,
    parse_program,
)
from secpart.semantics import (
    Action,
    Buffer,
    Configuration,
    Message,
    ProcessState,
    Semantics,
    base_rule,
    buffers_input,
    enabled_config_steps,
    enabled_stmt_steps,
    env_restrict,
    explore,
    format_trace,
    process_outputs,
    reachable,
    ready_channels,
    step_config,
    step_process,
    step_stmt,
    trace_from_json,
    trace_to_json,
)

EXAMPLES = Path(__file__).resolve().parent.parent / "examples" / "millionaires"
HOSTS = ("alice", "bob", "mpc")
ALICE, BOB, MPC = Endpoint.host("alice"), Endpoint.host("bob"), Endpoint.host("mpc")
ALICE_MALICIOUS = Attack({"A"}, {"A"})


@pytest.fixture
def env() -> HostEnvironment:
    """The millionaires' hosts."""
    return HostEnvironment.load(EXAMPLES / "hosts.txt")


def _sem(env: HostEnvironment, mode: SemanticsMode, attack: Attack = EMPTY_ATTACK) -> Semantics:
    return Semantics(mode, env, attack)


def _parse(text: str) -> Stmt:
    return parse_program(text, HOSTS)


def _with_inputs(env: HostEnvironment, name: str, a: int, b: int) -> Configuration:
    stmt = _parse((EXAMPLES / name).read_text())
    config = Configuration((ProcessState.of([ALICE, BOB, MPC], stmt),), _sem(env, SemanticsMode.IDEAL_CONCURRENT))
    config = step_config(config, Action.receive(ENVIRONMENT, ALICE, IntValue(a)))
    return step_config(config, Action.receive(ENVIRONMENT, BOB, IntValue(b)))


# ===== Buffers and actions =====


def test_buffer_is_fifo_per_channel() -> None:
    """Test that each channel keeps its own queue, oldest first."""
    ab, ba = Channel(ALICE, BOB), Channel(BOB, ALICE)
    buffer = Buffer().push(ab, IntValue(1)).push(ba, IntValue(9)).push(ab, IntValue(2))
    assert len(buffer) == 3
    assert buffer.front(ab) == IntValue(1)
    value, rest = buffer.pop(ab)
    assert value == IntValue(1)
    assert rest.get(ab) == (IntValue(2),)
    assert rest.get(ba) == (IntValue(9),)
    assert buffer == Buffer.of([(ba, [IntValue(9)]), (ab, [IntValue(1), IntValue(2)])])
    assert buffer.to_dict() == {"alice->bob": [1, 2], "bob->alice": [9]}


def test_buffer_pop_empty_channel() -> None:
    """Test popping a channel with nothing on it."""
    assert Buffer().front(Channel(ALICE, BOB)) is None
    with pytest.raises(IndexError, match="No message buffered on alice->bob"):
        Buffer().pop(Channel(ALICE, BOB))


def test_action_properties() -> None:
    """Test inputs, outputs and internal steps."""
    received = Action.receive(ENVIRONMENT, ALICE, IntValue(5))
    sent = Action.send(ALICE, BOB, TRUE)
    internal = Action.internal(MPC)
    assert received.is_input and received.actor == ALICE and received.touches_environment
    assert sent.is_output and not sent.is_internal and sent.actor == ALICE
    assert internal.is_internal and internal.message.value == UNIT
    assert str(received) == "in env->alice 5"
    assert str(sent) == "out alice->bob true"


def test_trace_serialization() -> None:
    """Test the JSON form, the restriction to the environment and the text rendering."""
    trace = (
        Action.receive(ENVIRONMENT, ALICE, IntValue(3)),
        Action.internal(ALICE),
        Action.send(ALICE, MPC, IntValue(3)),
        Action.send(ALICE, ENVIRONMENT, TRUE),
    )
    data = trace_to_json(trace)
    assert data[0] == {"dir": "in", "from": "env", "to": "alice", "value": 3}
    assert data[1]["value"] is None
    assert trace_from_json(data) == trace
    restricted = env_restrict(trace)
    assert restricted == (trace[0], trace[3])
    assert format_trace(restricted) == "in env->alice 3\nout alice->env true"


def test_base_rule() -> None:
    """Test stripping lifting and process rules off a rule name."""
    assert base_rule("P-Output:S-Delay:E-Output") == "E-Output"
    assert base_rule("S-If") == "S-If"


# ===== Expression rules =====


def test_let_evaluates_operators(env: HostEnvironment) -> None:
    """Test an operator step and the output it enables."""
    sem = _sem(env, SemanticsMode.IDEAL_SEQUENTIAL)
    (step,) = enabled_stmt_steps(sem, _parse("let x@alice = add(1, 2);\nlet _@alice = output(x)@alice;"))
    assert step.action == Action.internal(ALICE)
    assert step.rule == "E-Operator"
    assert step.target == Let("_", ALICE, Output(IntValue(3), ALICE), SKIP)
    (output,) = enabled_stmt_steps(sem, step.target)
    assert output.action == Action.send(ALICE, ENVIRONMENT, IntValue(3))
    assert output.rule == "E-Output"
    assert output.target == SKIP


def test_free_variables_block_steps(env: HostEnvironment) -> None:
    """Test that an open statement cannot step."""
    sem = _sem(env, SemanticsMode.IDEAL_SEQUENTIAL)
    assert enabled_stmt_steps(sem, Let("_", ALICE, Output(Var("x"), ALICE), SKIP)) == []


def test_input_ranges_over_domain(env: HostEnvironment) -> None:
    """Test that honest hosts read any value from the environment."""
    sem = _sem(env, SemanticsMode.REAL_SEQUENTIAL)
    steps = enabled_stmt_steps(sem, _parse("let a@alice = input@alice;"))
    assert [s.action for s in steps] == [Action.receive(ENVIRONMENT, ALICE, v) for v in DEFAULT_DOMAIN]
    assert {s.rule for s in steps} == {"E-Input"}


def test_malicious_hosts_skip_io(env: HostEnvironment) -> None:
    """Test that input and output at a malicious host are internal steps."""
    sem = _sem(env, SemanticsMode.REAL_SEQUENTIAL, ALICE_MALICIOUS)
    (read,) = enabled_stmt_steps(sem, _parse("let a@alice = input@alice;"))
    assert (read.action, read.rule) == (Action.internal(ALICE), "E-Input-Malicious")
    (write,) = enabled_stmt_steps(sem, _parse("let _@alice = output(1)@alice;"))
    assert (write.action, write.rule) == (Action.internal(ALICE), "E-Output-Malicious")


DECLASSIFY = "let x@mpc = declassify(true, <A & B, A & B>, <A | B, A & B>);"
ENDORSE = "let a2@mpc = endorse(5, <A, A>, <A, A & B>);"


@pytest.mark.parametrize(
    ("mode", "attack", "action", "rule"),
    [
        (SemanticsMode.IDEAL_SEQUENTIAL, Attack({"A"}), Action.send(MPC, ADVERSARY, TRUE), "E-Declassify"),
        (SemanticsMode.IDEAL_SEQUENTIAL, EMPTY_ATTACK, Action.internal(MPC), "E-Declassify-Skip"),
        (SemanticsMode.REAL_SEQUENTIAL, Attack({"A"}), Action.internal(MPC), "E-Declassify-Real"),
    ],
)
def test_declassify(env: HostEnvironment, mode: SemanticsMode, attack: Attack, action: Action, rule: str) -> None:
    """Test that ideal declassifications the attacker can see are sent to the adversary."""
    (step,) = enabled_stmt_steps(_sem(env, mode, attack), _parse(DECLASSIFY))
    assert (step.action, step.rule) == (action, rule)


def test_declassify_in_view_mode(env: HostEnvironment) -> None:
    """Test that a simulator's model reads leaked values back from the adversary side."""
    sem = Semantics(SemanticsMode.REAL_CONCURRENT, env, Attack({"A"}), view=True)
    steps = enabled_stmt_steps(sem, _parse(DECLASSIFY))
    assert {s.rule for s in steps} == {"E-Declassify-View"}
    assert {s.action for s in steps} == {Action.receive(MPC, ADVERSARY, v) for v in DEFAULT_DOMAIN}


def test_tainting_endorsement_reads_from_adversary(env: HostEnvironment) -> None:
    """Test that the ideal host takes untrusted endorsed values from the adversary."""
    steps = enabled_stmt_steps(_sem(env, SemanticsMode.IDEAL_SEQUENTIAL, ALICE_MALICIOUS), _parse(ENDORSE))
    assert {s.action for s in steps} == {Action.receive(ADVERSARY, MPC, v) for v in DEFAULT_DOMAIN}
    assert {s.rule for s in steps} == {"E-Endorse"}
    (trusted,) = enabled_stmt_steps(_sem(env, SemanticsMode.IDEAL_SEQUENTIAL), _parse(ENDORSE))
    assert trusted.rule == "E-Endorse-Skip"
    (real,) = enabled_stmt_steps(_sem(env, SemanticsMode.REAL_SEQUENTIAL, ALICE_MALICIOUS), _parse(ENDORSE))
    assert real.rule == "E-Endorse-Real"


def test_direct_communication(env: HostEnvironment) -> None:
    """Test recv and send under ideal and real rules."""
    ideal = _sem(env, SemanticsMode.IDEAL_SEQUENTIAL)
    real = _sem(env, SemanticsMode.REAL_SEQUENTIAL)
    (sent,) = enabled_stmt_steps(real, _parse("let _@bob = send 4 -> alice;"))
    assert (sent.action, sent.rule) == (Action.send(BOB, ALICE, IntValue(4)), "E-Send-Real")
    (skipped,) = enabled_stmt_steps(ideal, _parse("let _@bob = send 4 -> alice;"))
    assert skipped.action == Action.internal(BOB)
    received = enabled_stmt_steps(real, _parse("let y@bob = recv alice;"))
    assert {s.action.channel for s in received} == {Channel(ALICE, BOB)}
    assert len(received) == len(DEFAULT_DOMAIN)


# ===== Statement rules =====


MOVE = "move alice.5 -> bob.b;\nlet _@bob = output(b)@bob;"


@pytest.mark.parametrize(
    ("mode", "action", "rule"),
    [
        (SemanticsMode.IDEAL_SEQUENTIAL, Action.internal(ALICE), "S-Communicate"),
        (SemanticsMode.REAL_SEQUENTIAL, Action.send(ALICE, BOB, IntValue(5)), "S-Communicate-Real"),
    ],
)
def test_move(env: HostEnvironment, mode: SemanticsMode, action: Action, rule: str) -> None:
    """Test that a move substitutes the value at the receiver."""
    (step,) = enabled_stmt_steps(_sem(env, mode), _parse(MOVE))
    assert (step.action, step.rule) == (action, rule)
    assert step.target == Let("_", BOB, Output(IntValue(5), BOB), SKIP)


def test_async_move_goes_through_pending(env: HostEnvironment) -> None:
    """Test that asynchronous moves send first and deliver in a second step."""
    sem = _sem(env, SemanticsMode.ASYNC)
    (sent,) = enabled_stmt_steps(sem, _parse(MOVE))
    assert sent.rule == "S-Communicate-Send"
    assert sent.action == Action.send(ALICE, BOB, IntValue(5))
    assert isinstance(sent.target, MovePending)
    (delivered,) = enabled_stmt_steps(sem, sent.target)
    assert (delivered.action, delivered.rule) == (Action.internal(BOB), "S-Communicate-Receive")
    assert delivered.target == Let("_", BOB, Output(IntValue(5), BOB), SKIP)


def test_step_not_enabled(env: HostEnvironment) -> None:
    """Test stepping with an action the statement cannot take."""
    sem = _sem(env, SemanticsMode.REAL_SEQUENTIAL)
    with pytest.raises(NotEnabledError, match="is not enabled"):
        step_stmt(sem, _parse(MOVE), Action.send(ALICE, ENVIRONMENT, IntValue(9)))


def test_concurrent_modes_step_independent_hosts(env: HostEnvironment) -> None:
    """Test that statements at other hosts step past earlier ones only in concurrent modes."""
    stmt = _parse("let x@alice = 1;\nlet y@bob = 2;")
    assert len(enabled_stmt_steps(_sem(env, SemanticsMode.IDEAL_SEQUENTIAL), stmt)) == 1
    steps = enabled_stmt_steps(_sem(env, SemanticsMode.IDEAL_CONCURRENT), stmt)
    assert [s.rule for s in steps] == ["E-Atomic", "S-Delay:E-Atomic"]
    assert steps[1].action == Action.internal(BOB)
    assert steps[1].target == Let("x", ALICE, AtomExpr(IntValue(1)), SKIP)
    same_host = _parse("let x@alice = 1;\nlet y@alice = 2;")
    assert len(enabled_stmt_steps(_sem(env, SemanticsMode.IDEAL_CONCURRENT), same_host)) == 1


def test_delayed_conditional_joins_equal_branches(env: HostEnvironment) -> None:
    """Test that both branches step together when they take the same action."""
    sem = _sem(env, SemanticsMode.REAL_CONCURRENT)
    stmt = _parse("if alice.true { let _@bob = output(1)@bob; } else { let _@bob = output(1)@bob; }")
    steps = enabled_stmt_steps(sem, stmt)
    assert sorted(s.rule for s in steps) == ["S-If", "S-If-Delay:E-Output"]
    joined = step_stmt(sem, stmt, Action.send(BOB, ENVIRONMENT, IntValue(1)))
    assert isinstance(joined, If)
    assert joined.then == SKIP and joined.orelse == SKIP


def test_delayed_conditional_with_different_branches_is_stuck(env: HostEnvironment) -> None:
    """Test that a step enabled in only one branch cannot be taken early."""
    sem = _sem(env, SemanticsMode.REAL_CONCURRENT)
    stmt = _parse("if alice.true { let _@bob = output(1)@bob; } else { let _@bob = output(2)@bob; }")
    assert [s.rule for s in enabled_stmt_steps(sem, stmt)] == ["S-If"]
    with pytest.raises(StuckBranchError, match="only one branch"):
        step_stmt(sem, stmt, Action.send(BOB, ENVIRONMENT, IntValue(1)))


# ===== Processes =====


def test_buffers_input() -> None:
    """Test which incoming messages a process keeps."""
    sem = Semantics(SemanticsMode.REAL_CONCURRENT, HostEnvironment.parse("host alice = <A, A>\nhost bob = <B, B>"))
    bob = ProcessState.of([BOB], SKIP)
    both = ProcessState.of([ALICE, BOB], SKIP)
    assert buffers_input(sem, bob, Channel(ALICE, BOB))
    assert not buffers_input(sem, bob, Channel(BOB, ALICE))
    assert not buffers_input(sem, both, Channel(ALICE, BOB))
    assert not buffers_input(sem, bob, Channel(BOB, ADVERSARY))
    assert buffers_input(sem.with_mode(SemanticsMode.REAL_CONCURRENT, view=True), bob, Channel(BOB, ADVERSARY))


def test_process_reads_from_buffer(env: HostEnvironment) -> None:
    """Test that a waiting receive consumes the oldest buffered message."""
    sem = _sem(env, SemanticsMode.REAL_SEQUENTIAL)
    stmt = _parse("let y@bob = recv alice;\nlet _@bob = output(y)@bob;")
    assert process_outputs(sem, ProcessState.of([BOB], stmt)) == []
    process = ProcessState.of([BOB], stmt, Buffer.of([(Channel(ALICE, BOB), [IntValue(4), IntValue(6)])]))
    (step,) = process_outputs(sem, process)
    assert step.action == Action.internal(BOB)
    assert step.rule == "P-Internal:E-Receive-Real"
    assert step.consumed == Message(ALICE, BOB, IntValue(4))
    assert step.target.stmt == Let("_", BOB, Output(IntValue(4), BOB), SKIP)
    assert step.target.buffer.get(Channel(ALICE, BOB)) == (IntValue(6),)
    (output,) = process_outputs(sem, step.target)
    assert output.rule == "P-Output:E-Output"


def test_step_process_discards_foreign_input(env: HostEnvironment) -> None:
    """Test that inputs are always accepted and kept only when addressed to the process."""
    sem = _sem(env, SemanticsMode.REAL_SEQUENTIAL)
    process = ProcessState.of([BOB], SKIP)
    assert step_process(sem, process, Action.receive(ALICE, MPC, IntValue(1))) is process
    kept = step_process(sem, process, Action.receive(ALICE, BOB, IntValue(1)))
    assert len(kept.buffer) == 1
    assert process.finished
    with pytest.raises(NotEnabledError, match="not enabled at process"):
        step_process(sem, process, Action.send(BOB, ENVIRONMENT, IntValue(1)))


# ===== Configurations =====


def test_configuration_rejects_shared_hosts(env: HostEnvironment) -> None:
    """Test that a host belongs to at most one process."""
    sem = _sem(env, SemanticsMode.REAL_CONCURRENT)
    with pytest.raises(HostEnvironmentError, match="belong to two processes"):
        Configuration((ProcessState.of([ALICE], SKIP), ProcessState.of([ALICE, BOB], SKIP)), sem)


def test_two_outputs_on_one_channel(env: HostEnvironment) -> None:
    """Test that two processes sending different values on one channel break determinism."""
    sem = _sem(env, SemanticsMode.REAL_SEQUENTIAL)
    config = Configuration(
        (
            ProcessState.of([ALICE], _parse("let _@alice = output(1)@alice;")),
            ProcessState.of([BOB], _parse("let _@alice = output(2)@alice;")),
        ),
        sem,
    )
    with pytest.raises(DeterminismViolationError, match="Two outputs on alice->env"):
        enabled_config_steps(config)


def test_outputs_are_delivered_to_other_processes(env: HostEnvironment) -> None:
    """Test that one process's output lands in the receiver's buffer."""
    sem = _sem(env, SemanticsMode.REAL_CONCURRENT)
    config = Configuration(
        (
            ProcessState.of([ALICE], _parse("let _@alice = send 7 -> bob;")),
            ProcessState.of([BOB], _parse("let y@bob = recv alice;")),
        ),
        sem,
    )
    assert ready_channels(config) == [Channel(ALICE, BOB)]
    after = step_config(config, Action.send(ALICE, BOB, IntValue(7)))
    assert after.processes[1].buffer.get(Channel(ALICE, BOB)) == (IntValue(7),)
    assert ready_channels(after) == [Channel(BOB, BOB)]
    done = step_config(after, Action.internal(BOB))
    assert done.finished
    assert done.to_dict()["processes"][1] == {"hosts": ["bob"], "buffer": {}, "stmt": ""}
    with pytest.raises(NotEnabledError):
        step_config(done, Action.internal(BOB))


def test_choreography_waits_for_inputs(env: HostEnvironment) -> None:
    """Test that nothing is ready before the environment speaks."""
    stmt = _parse((EXAMPLES / "choreography.prog").read_text())
    config = Configuration((ProcessState.of([ALICE, BOB, MPC], stmt),), _sem(env, SemanticsMode.IDEAL_CONCURRENT))
    assert ready_channels(config) == []
    assert not config.finished
    assert explore(config) == frozenset({()})


def test_explore_synchronized_outputs(env: HostEnvironment) -> None:
    """Test that the sync message fixes the output order and the answer."""
    config = _with_inputs(env, "choreography.prog", 3, 5)
    assert ready_channels(config) == [Channel(ALICE, ALICE), Channel(BOB, BOB)]
    expected = (Action.send(ALICE, ENVIRONMENT, TRUE), Action.send(BOB, ENVIRONMENT, TRUE))
    assert explore(config) == frozenset({expected})


def test_explore_unsynchronized_outputs(env: HostEnvironment) -> None:
    """Test that without the sync message bob may output first."""
    config = _with_inputs(env, "choreography_nosync.prog", 5, 3)
    alice, bob = Action.send(ALICE, ENVIRONMENT, FALSE), Action.send(BOB, ENVIRONMENT, FALSE)
    assert explore(config) == frozenset({(alice, bob), (bob, alice)})


def test_explore_stops_at_state_limit(env: HostEnvironment) -> None:
    """Test that a state space larger than the limit is an error, not a partial answer."""
    config = _with_inputs(env, "choreography_nosync.prog", 5, 3)
    with pytest.raises(DepthExceededError, match="exceeds 1 states"):
        explore(config, limit=1)


def test_reachable_warns_when_truncated(env: HostEnvironment, caplog: pytest.LogCaptureFixture) -> None:
    """Test that cutting the search short is logged."""
    config = _with_inputs(env, "choreography_nosync.prog", 5, 3)
    with caplog.at_level(logging.WARNING, logger="secpart.semantics.configuration"):
        assert list(reachable(config, limit=1)) == [config]
    assert "Stopped exploring after 1 states" in caplog.text
    caplog.clear()
    with caplog.at_level(logging.WARNING, logger="secpart.semantics.configuration"):
        assert len(list(reachable(config))) > 1
    assert not caplog.text


def test_reachable_states_stay_well_typed(env: HostEnvironment) -> None:
    """Test that every reachable state of the choreography still type checks."""
    config = _with_inputs(env, "choreography.prog", 2, 2)
    states = list(reachable(config))
    assert any(state.finished for state in states)
    for state in states:
        report = check_stmt(None, state.processes[0].stmt, env)
        assert report.ok, [str(d) for d in report.diagnostics]
