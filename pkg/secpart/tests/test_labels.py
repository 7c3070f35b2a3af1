"""Tests for principals, labels, attacks and host environments."""

import operator

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secpart.enums import EndpointKind, HostClass
from secpart.errors import HostEnvironmentError, InvalidAttackError, LabelSyntaxError
from secpart.labels import (
    EMPTY_ATTACK,
    FULLY_TRUSTED,
    PUBLIC_TRUSTED,
    SECRET_UNTRUSTED,
    STRONGEST,
    WEAKEST,
    Attack,
    HostEnvironment,
    Label,
    Principal,
    acts_for,
    attack_candidates,
    channel_label,
    classify_host,
    enumerate_attacks,
    implies_by_truth_table,
)
from secpart.lang import ADVERSARY, ENVIRONMENT, IDEAL, Endpoint

ATOMS = ("A", "B", "C", "D")

principals = st.recursive(
    st.one_of(st.sampled_from(ATOMS).map(Principal.atom), st.just(STRONGEST), st.just(WEAKEST)),
    lambda inner: st.one_of(st.builds(operator.and_, inner, inner), st.builds(operator.or_, inner, inner)),
    max_leaves=8,
)


@st.composite
def attacks(draw: st.DrawFn) -> Attack:
    """Valid attacks over ATOMS."""
    public = draw(st.frozensets(st.sampled_from(ATOMS)))
    untrusted = draw(st.frozensets(st.sampled_from(sorted(public)))) if public else frozenset()
    return Attack(public, untrusted)


A, B, C = Principal.atom("A"), Principal.atom("B"), Principal.atom("C")


@pytest.fixture
def millionaires_env() -> HostEnvironment:
    """Hosts of the millionaires' problem."""
    return HostEnvironment.parse("host alice = <A, A>\nhost bob = <B, B>\nhost mpc = <A & B, A & B>\n")


# ===== Principals =====


def test_principal_parse_precedence() -> None:
    """Test that conjunction binds tighter than disjunction."""
    assert Principal.parse("A & B | C") == (A & B) | C
    assert Principal.parse("A & (B | C)") == (A & B) | (A & C)


def test_principal_constants_parse() -> None:
    """Test the top and bot keywords."""
    assert Principal.parse("top") == STRONGEST
    assert Principal.parse("bot") == WEAKEST
    assert str(STRONGEST) == "top"
    assert str(WEAKEST) == "bot"


@pytest.mark.parametrize("text", ["", "A &", "(A | B", "A B", "A $ B", "| A"])
def test_principal_parse_rejects(text: str) -> None:
    """Test malformed principals."""
    with pytest.raises(LabelSyntaxError):
        Principal.parse(text)


def test_acts_for_basic() -> None:
    """Test acts-for on atoms and their combinations."""
    assert acts_for(A & B, A)
    assert not acts_for(A, A & B)
    assert acts_for(A, A | B)
    assert acts_for(STRONGEST, A)
    assert acts_for(A, WEAKEST)
    assert not acts_for(WEAKEST, A)


def test_principal_absorption_is_canonical() -> None:
    """Test that redundant clauses are dropped."""
    assert A | (A & B) == A
    assert A & (A | B) == A
    assert (A & B).atoms == frozenset({"A", "B"})


def test_principal_str() -> None:
    """Test the rendering of multi-clause principals."""
    assert str(A & B) == "A & B"
    assert str((A & B) | C) == "C | (A & B)"


@settings(max_examples=500, deadline=None)
@given(principals, principals)
def test_acts_for_matches_truth_table(p: Principal, q: Principal) -> None:
    """Test the structural decision procedure against the truth-table oracle."""
    assert p.acts_for(q) == implies_by_truth_table(p, q, ATOMS)


@settings(max_examples=500, deadline=None)
@given(principals, principals, principals)
def test_lattice_laws(p: Principal, q: Principal, r: Principal) -> None:
    """Test commutativity, absorption, distributivity and the bounds."""
    assert p & q == q & p
    assert p | q == q | p
    assert p & (p | q) == p
    assert p | (p & q) == p
    assert p & (q | r) == (p & q) | (p & r)
    assert (p & q).acts_for(p)
    assert p.acts_for(p | q)
    assert STRONGEST.acts_for(p)
    assert p.acts_for(WEAKEST)


@settings(max_examples=500, deadline=None)
@given(principals)
def test_principal_parses_its_rendering(p: Principal) -> None:
    """Test that printed principals parse back to themselves."""
    assert Principal.parse(str(p)) == p


# ===== Labels =====


def test_label_parse() -> None:
    """Test parsing of labels with nested principals."""
    label = Label.parse("<A & (B | C), A>")
    assert label.conf == A & (B | C)
    assert label.integ == A
    assert str(Label.parse("<A | B, A & B>")) == "<A | B, A & B>"


@pytest.mark.parametrize("text", ["A, B", "<A>", "<A, B", "<A, B, C>"])
def test_label_parse_rejects(text: str) -> None:
    """Test malformed labels."""
    with pytest.raises(LabelSyntaxError):
        Label.parse(text)


def test_label_flows_to() -> None:
    """Test that flows go towards more secret and less trusted labels."""
    assert PUBLIC_TRUSTED.flows_to(SECRET_UNTRUSTED)
    assert not SECRET_UNTRUSTED.flows_to(PUBLIC_TRUSTED)
    assert Label(A, A).flows_to(Label(A & B, A))
    assert not Label(A & B, A).flows_to(Label(A, A))


def test_label_join_and_meet_bound_both_sides() -> None:
    """Test that the join is an upper and the meet a lower bound."""
    left, right = Label(A, B), Label(B, A)
    join, meet = left.join(right), left.meet(right)
    assert left.flows_to(join) and right.flows_to(join)
    assert meet.flows_to(left) and meet.flows_to(right)


def test_label_projections_and_uncompromised() -> None:
    """Test the component projections and the uncompromised check."""
    label = Label(A, A & B)
    assert label.conf_projection == Label(A, WEAKEST)
    assert label.integ_projection == Label(WEAKEST, A & B)
    assert label.uncompromised
    assert not Label(A & B, A).uncompromised


# ===== Attacks =====


def test_attack_parse() -> None:
    """Test the attack file syntax, comments and defaults."""
    attack = Attack.parse("# alice is corrupted\npublic = [A, B]\nuntrusted = [A]\n")
    assert attack.public_atoms == frozenset({"A", "B"})
    assert attack.untrusted_atoms == frozenset({"A"})
    assert Attack.parse("") == EMPTY_ATTACK


def test_attack_untrusted_must_be_public() -> None:
    """Test that untrusted but secret atoms are rejected."""
    with pytest.raises(InvalidAttackError, match="must be public"):
        Attack.parse("public = []\nuntrusted = [A]")


@pytest.mark.parametrize("text", ["public = A", "public = [A]\npublic = [B]", "secret = [A]"])
def test_attack_parse_rejects(text: str) -> None:
    """Test malformed attack files."""
    with pytest.raises(InvalidAttackError):
        Attack.parse(text)


def test_attack_check_atoms() -> None:
    """Test that attacks may only name declared atoms."""
    Attack({"A"}, {"A"}).check_atoms({"A", "B"})
    with pytest.raises(InvalidAttackError, match="unknown atoms"):
        Attack({"Z"}).check_atoms({"A", "B"})


def test_enumerate_attacks_over_two_atoms() -> None:
    """Test that 9 of the 16 candidate pairs over two atoms are valid."""
    assert len(list(attack_candidates(["A", "B"]))) == 16
    valid = list(enumerate_attacks(["B", "A"]))
    assert len(valid) == 9
    assert valid[0] == EMPTY_ATTACK
    assert all(a.untrusted_atoms <= a.public_atoms for a in valid)


@settings(max_examples=500, deadline=None)
@given(attacks(), principals, principals)
def test_attack_sets_are_upward_closed(attack: Attack, p: Principal, q: Principal) -> None:
    """Test that public and untrusted principals are closed under weakening and conjunction."""
    if attack.is_public(p) and attack.is_public(q):
        assert attack.is_public(p & q)
    if attack.is_public(p):
        assert attack.is_public(p | q)
    if p.acts_for(q) and attack.is_untrusted(p):
        assert attack.is_untrusted(q)
    if attack.is_untrusted(p):
        assert attack.is_public(p)


# ===== Host environments =====


def test_host_environment_parse(millionaires_env: HostEnvironment) -> None:
    """Test declaration order, labels and the atom universe."""
    assert list(millionaires_env) == ["alice", "bob", "mpc"]
    assert millionaires_env.label("mpc") == Label(A & B, A & B)
    assert millionaires_env.atoms == frozenset({"A", "B"})
    assert "bob" in millionaires_env
    assert "carol" not in millionaires_env


@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("host alice = <A, A>\nhost alice = <B, B>", "declared twice"),
        ("host alice = <A, bot>", "compromised"),
        ("host env = <A, A>", "reserved"),
        ("alice = <A, A>", "expected"),
        ("host alice = <A, >", "Line 1"),
    ],
)
def test_host_environment_rejects(text: str, message: str) -> None:
    """Test malformed host files."""
    with pytest.raises(HostEnvironmentError, match=message):
        HostEnvironment.parse(text)


def test_unknown_host_label(millionaires_env: HostEnvironment) -> None:
    """Test looking up an undeclared host."""
    with pytest.raises(HostEnvironmentError, match="Unknown host"):
        millionaires_env.label("carol")


@pytest.mark.parametrize(
    ("attack", "expected"),
    [
        (EMPTY_ATTACK, {"alice": HostClass.HONEST, "bob": HostClass.HONEST, "mpc": HostClass.HONEST}),
        (
            Attack({"A"}, {"A"}),
            {"alice": HostClass.MALICIOUS, "bob": HostClass.HONEST, "mpc": HostClass.HONEST},
        ),
        (
            Attack({"A"}),
            {"alice": HostClass.SEMI_HONEST, "bob": HostClass.HONEST, "mpc": HostClass.HONEST},
        ),
        (
            Attack({"A", "B"}, {"A"}),
            {"alice": HostClass.MALICIOUS, "bob": HostClass.SEMI_HONEST, "mpc": HostClass.SEMI_HONEST},
        ),
        (
            Attack({"A", "B"}, {"A", "B"}),
            {"alice": HostClass.MALICIOUS, "bob": HostClass.MALICIOUS, "mpc": HostClass.MALICIOUS},
        ),
    ],
)
def test_classify_hosts(millionaires_env: HostEnvironment, attack: Attack, expected: dict[str, HostClass]) -> None:
    """Test the honest, semi-honest and malicious classification."""
    assert {h: classify_host(h, millionaires_env, attack) for h in millionaires_env} == expected


def test_special_endpoints_are_honest(millionaires_env: HostEnvironment) -> None:
    """Test that the ideal host and the environment are honest and the adversary is not."""
    attack = Attack({"A", "B"}, {"A", "B"})
    assert millionaires_env.is_honest_endpoint(IDEAL, attack)
    assert millionaires_env.is_honest_endpoint(ENVIRONMENT, attack)
    assert not millionaires_env.is_honest_endpoint(ADVERSARY, EMPTY_ATTACK)
    assert millionaires_env.label_of(IDEAL) == FULLY_TRUSTED
    assert ADVERSARY.kind is EndpointKind.ADVERSARY


def test_channel_label_is_pointwise_disjunction(millionaires_env: HostEnvironment) -> None:
    """Test channel labels between hosts and with the adversary."""
    alice, bob = Endpoint.host("alice"), Endpoint.host("bob")
    assert channel_label(alice, bob, millionaires_env) == Label(A | B, A | B)
    assert channel_label(alice, ADVERSARY, millionaires_env).conf == WEAKEST
