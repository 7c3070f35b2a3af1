"""Properties of random choreographies across the pipeline."""

import itertools

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from secpart.checking import check_stmt
from secpart.enums import ProgramKind, SemanticsMode
from secpart.harness import Pipeline, check_bisimulation, env_input_assignments
from secpart.harness.runner import choreography_config, distributed_config, make_semantics
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment, enumerate_attacks
from secpart.lang import (
    ENVIRONMENT,
    FALSE,
    SKIP,
    TRUE,
    UNIT,
    Case,
    Endpoint,
    If,
    IntValue,
    Let,
    Operator,
    Output,
    Stmt,
    Value,
    alpha_equal,
    format_program,
    parse_file,
    parse_program,
    pretty_print,
    walk,
)
from secpart.semantics import Action, Configuration, enabled_config_steps, reachable, step_config
from secpart.transform import corrupt_config, corrupt_stmt, merge, partition, refines

HOSTS = ("alice", "bob", "carol", "mpc")
ENV_DOMAIN = (IntValue(0), IntValue(1))
FOUR = HostEnvironment.parse("host alice = <A, A>\nhost bob = <B, B>\nhost carol = <A, A>\nhost mpc = <A & B, A & B>\n")
UNIFORM = HostEnvironment.parse("".join(f"host {h} = <A & B, A & B>\n" for h in HOSTS))
ATTACKS = list(enumerate_attacks(["A", "B"]))
LITERALS = ("0", "1", "true")
DECLASSIFY = "declassify({}, <A & B, A & B>, <A | B, A & B>)"
ENDORSE = "endorse({}, <A, A>, <A, A & B>)"
TRUSTED_ENDORSE = "endorse({}, <A & B, A & B>, <A & B, A & B>)"


def _statement(draw: st.DrawFn, known: dict[str, list[str]], fresh: str, *, inputs: bool, well_typed: bool) -> str:
    """One statement at a random host; records what `fresh` binds in `known`."""
    host = draw(st.sampled_from(HOSTS))
    kinds = ["literal", "op", *(["input"] if inputs else [])]
    if known[host]:
        kinds += ["move", "output"]
        if host == "mpc":
            kinds += ["declassify", "endorse"]
    atom = st.sampled_from([*known[host], *LITERALS])
    match draw(st.sampled_from(kinds)):
        case "move":
            other = draw(st.sampled_from([h for h in HOSTS if h != host]))
            known[other].append(fresh)
            return f"move {host}.{draw(st.sampled_from(known[host]))} -> {other}.{fresh};"
        case "output":
            return f"let _@{host} = output({draw(atom)})@{host};"
        case "input":
            expr = f"input@{host}"
        case "literal":
            expr = draw(st.sampled_from(LITERALS))
        case "op":
            op = draw(st.sampled_from(list(Operator)))
            expr = f"{op.keyword}({', '.join(draw(atom) for _ in range(op.arity))})"
        case "declassify":
            expr = DECLASSIFY.format(draw(st.sampled_from(known[host])))
        case _:
            template = TRUSTED_ENDORSE if well_typed else ENDORSE
            expr = template.format(draw(st.sampled_from(known[host])))
    known[host].append(fresh)
    return f"let {fresh}@{host} = {expr};"


@st.composite
def choreographies(draw: st.DrawFn, max_statements: int = 12, max_inputs: int = 3, *, well_typed: bool = False) -> Stmt:
    """Choreographies over four hosts with at most one conditional.

    The conditional selects its branch to every other host before either arm runs. With `well_typed`,
    guards are literals and endorsements stay within one label, so most draws type check under
    uniform host labels.
    """
    known: dict[str, list[str]] = {h: [] for h in HOSTS}
    names = (f"v{index}" for index in itertools.count())
    inputs = 0
    total = draw(st.integers(1, max_statements))
    branch_at = draw(st.one_of(st.none(), st.integers(0, total - 1)))
    lines: list[str] = []

    def simple(scope: dict[str, list[str]]) -> str:
        nonlocal inputs
        line = _statement(draw, scope, next(names), inputs=inputs < max_inputs, well_typed=well_typed)
        if "input@" in line:
            inputs += 1
        return line

    index = 0
    while index < total:
        if index != branch_at:
            lines.append(simple(known))
            index += 1
            continue
        host = draw(st.sampled_from(HOSTS))
        literal = well_typed or not known[host]
        guard = draw(st.sampled_from(["true", "false"] if literal else [*known[host], "true"]))
        arm_length = draw(st.integers(0, max(0, total - index - 1)))
        arms = []
        for selected in ("true", "false"):
            scope = {h: list(v) for h, v in known.items()}
            body = [f"select {host}.{selected} -> {other};" for other in HOSTS if other != host]
            body += [simple(scope) for _ in range(arm_length)]
            arms.append("\n".join(f"    {line}" for line in body))
        lines.append(f"if {host}.{guard} {{\n{arms[0]}\n}} else {{\n{arms[1]}\n}}")
        index += 1 + arm_length
    return parse_program("\n".join(lines) + "\n")


def _conditional_hosts(choreography: Stmt) -> set[str]:
    return {node.host.name for node in walk(choreography) if isinstance(node, If)}


def _honest_guards(choreography: Stmt, attack: Attack) -> bool:
    """Whether every conditional is guarded at a host the attack does not control."""
    return not any(FOUR.is_malicious(host, attack) for host in _conditional_hosts(choreography))


def _started(config: Configuration) -> Configuration:
    """The configuration after the first environment input choice."""
    for action in next(env_input_assignments(config, ENV_DOMAIN)):
        config = step_config(config, action)
    return config


def _states(config: Configuration, limit: int = 300) -> list[Configuration]:
    return list(itertools.islice(reachable(_started(config)), limit))


# ===== Stepping =====


@pytest.mark.parametrize("mode", [SemanticsMode.IDEAL_CONCURRENT, SemanticsMode.ASYNC], ids=lambda m: m.name)
@settings(max_examples=500, deadline=None)
@given(choreography=choreographies())
def test_one_output_per_channel(mode: SemanticsMode, choreography: Stmt) -> None:
    """Test that no reachable state offers two steps on one channel."""
    config = choreography_config(choreography, make_semantics(mode, FOUR))
    for state in _states(config):
        channels = [step.action.channel for step in enabled_config_steps(state)]
        assert len(channels) == len(set(channels))


@settings(max_examples=500, deadline=None)
@given(choreography=choreographies())
def test_steps_of_different_hosts_commute(choreography: Stmt) -> None:
    """Test that steps of different hosts, environment inputs included, can be taken in either order."""
    sem = make_semantics(SemanticsMode.REAL_CONCURRENT, FOUR)
    config = distributed_config(partition(choreography, FOUR), sem)
    for state in _states(config, limit=100):
        steps = enabled_config_steps(state)
        for first, second in itertools.combinations(steps, 2):
            if first.action.message.sender == second.action.message.sender:
                continue
            assert step_config(first.target, second.action) == step_config(second.target, first.action)
        for step in steps:
            for host in HOSTS:
                if Endpoint.host(host) == step.action.message.sender:
                    continue
                given_input = Action.receive(ENVIRONMENT, Endpoint.host(host), IntValue(0))
                after_input = step_config(state, given_input)
                assert step_config(step.target, given_input) == step_config(after_input, step.action)


@settings(max_examples=500, deadline=None)
@given(choreography=choreographies(), value=st.sampled_from([UNIT, TRUE, IntValue(7)]))
def test_inputs_are_always_accepted(choreography: Stmt, value: Value) -> None:
    """Test that every state takes any environment input, relevant or not."""
    config = choreography_config(choreography, make_semantics(SemanticsMode.IDEAL_CONCURRENT, FOUR))
    for state in _states(config, limit=50):
        for host in HOSTS:
            step_config(state, Action.receive(ENVIRONMENT, Endpoint.host(host), value))


@settings(max_examples=500, deadline=None)
@given(choreography=choreographies(well_typed=True))
def test_stepping_preserves_typing(choreography: Stmt) -> None:
    """Test that every reachable state of a well-typed choreography still type checks."""
    assume(check_stmt(None, choreography, UNIFORM).ok)
    config = choreography_config(choreography, make_semantics(SemanticsMode.IDEAL_CONCURRENT, UNIFORM))
    for state in _states(config):
        report = check_stmt(None, state.processes[0].stmt, UNIFORM)
        assert report.ok, [str(d) for d in report.diagnostics]


# ===== Syntax =====


@settings(max_examples=500, deadline=None)
@given(choreography=choreographies())
def test_printed_programs_parse_back(choreography: Stmt) -> None:
    """Test that the printer and the parser agree on choreographies and on every projection."""
    assert alpha_equal(parse_program(pretty_print(choreography)), choreography)
    distributed = partition(choreography, FOUR)
    for host in distributed:
        stmt = distributed[host].stmt
        printed = format_program(stmt, ProgramKind.DISTRIBUTED, Endpoint.host(host))
        assert alpha_equal(parse_file(printed, HOSTS).stmt, stmt)


# ===== Transformations =====


@settings(max_examples=500, deadline=None)
@given(choreography=choreographies(), attack=st.sampled_from(ATTACKS))
def test_corruption_commutes_with_partition(choreography: Stmt, attack: Attack) -> None:
    """Test that erasing malicious programs matches projecting the corrupted choreography."""
    assume(_honest_guards(choreography, attack))
    erased = corrupt_config(partition(choreography, FOUR), FOUR, attack)
    projected = partition(corrupt_stmt(choreography, FOUR, attack), FOUR)
    honest = [h for h in projected if not FOUR.is_malicious(h, attack)]
    assert list(erased) == honest
    for host in honest:
        assert alpha_equal(erased[host].stmt, projected[host].stmt)


@settings(max_examples=500, deadline=None)
@given(choreography=choreographies(max_statements=6), attack=st.sampled_from(ATTACKS))
def test_projection_is_a_bisimulation(choreography: Stmt, attack: Attack) -> None:
    """Test that the asynchronous choreography and its projection offer the same actions throughout."""
    assume(_honest_guards(choreography, attack))
    pipeline = Pipeline(choreography, FOUR, attack)
    verdict = check_bisimulation(pipeline.corrupt(SemanticsMode.ASYNC), pipeline.target(), ENV_DOMAIN)
    assert verdict.passed, verdict.detail


# ===== Merge =====

ALICE, BOB, MPC = Endpoint.host("alice"), Endpoint.host("bob"), Endpoint.host("mpc")
CASE_KEYS = (FALSE, TRUE, IntValue(0))


def _leaf(path: tuple[Value, ...]) -> Stmt:
    """An output at bob that only depends on the branch path leading to it."""
    code = sum((CASE_KEYS.index(key) + 1) * 4**depth for depth, key in enumerate(path))
    return Let("_", BOB, Output(IntValue(code), BOB), SKIP)


@st.composite
def case_trees(draw: st.DrawFn) -> Stmt:
    """Bob's view of two nested selections, with a random subset of the branches present.

    Whatever sits under a given branch path is fixed, so any two trees merge.
    """
    keys = st.sets(st.sampled_from(CASE_KEYS), min_size=1)
    branches = []
    for key in draw(keys):
        if key == TRUE:
            body: Stmt = Case(MPC, BOB, tuple((inner, _leaf((key, inner))) for inner in draw(keys)))
        else:
            body = _leaf((key,))
        branches.append((key, body))
    return Case(ALICE, BOB, tuple(branches))


@settings(max_examples=500, deadline=None)
@given(a=case_trees(), b=case_trees(), c=case_trees())
def test_merge_is_a_join(a: Stmt, b: Stmt, c: Stmt) -> None:
    """Test that merging case trees is commutative, associative and idempotent, and only adds branches."""
    assert merge(a, b) == merge(b, a)
    assert merge(merge(a, b), c) == merge(a, merge(b, c))
    assert merge(a, a) == a
    assert refines(a, merge(a, b))
    assert refines(b, merge(a, b))


# ===== Generator =====


def test_generated_choreographies_parse() -> None:
    """Test that the strategy's syntax is what the parser expects and type checks."""
    text = (
        "let v0@alice = input@alice;\n"
        "move alice.v0 -> mpc.v1;\n"
        f"let v2@mpc = {DECLASSIFY.format('v1')};\n"
        f"let v3@mpc = {TRUSTED_ENDORSE.format('v2')};\n"
        "if alice.true {\n"
        "    select alice.true -> bob;\n    select alice.true -> carol;\n    select alice.true -> mpc;\n"
        "    let _@bob = output(1)@bob;\n"
        "} else {\n"
        "    select alice.false -> bob;\n    select alice.false -> carol;\n    select alice.false -> mpc;\n"
        "    let v4@carol = not(true);\n"
        "}\n"
    )
    stmt = parse_program(text)
    assert check_stmt(None, stmt, UNIFORM).ok
    assert _conditional_hosts(stmt) == {"alice"}
    assert list(partition(stmt, FOUR)) == list(HOSTS)
    assert corrupt_stmt(stmt, FOUR, EMPTY_ATTACK) == stmt
