"""Stepping disciplines and the expression rules."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import TypeVar

from typing_extensions import assert_never

from secpart.enums import SemanticsMode
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment
from secpart.lang.analysis import expr_args
from secpart.lang.ast import AtomExpr, Declassify, Endorse, Expr, Input, OpExpr, Output, Receive, Send
from secpart.lang.operators import eval_op
from secpart.lang.values import ADVERSARY, DEFAULT_DOMAIN, ENVIRONMENT, UNIT, Channel, Endpoint, Value, Var
from secpart.semantics.actions import Action, Demand, Step

T = TypeVar("T")


@dataclass(frozen=True, eq=False)
class Semantics:
    """Everything stepping depends on besides the state.

    Args:
        mode: Ideal or real rules, with or without out-of-order stepping.
        env: Host labels.
        attack: Decides which hosts are malicious and which downgrades the adversary sees.
        domain: Finite set of values a statement may receive from the adversary or the environment.
        synchronous: Forbid delaying past a frame when either end of the action is one of its hosts.
        view: Run as a simulator's model of the other side, which receives declassified values instead
            of sending them.

    """

    mode: SemanticsMode
    env: HostEnvironment
    attack: Attack = EMPTY_ATTACK
    domain: tuple[Value, ...] = DEFAULT_DOMAIN
    synchronous: bool = False
    view: bool = False

    @property
    def ideal(self) -> bool:
        """Whether ideal rules apply."""
        return self.mode.is_ideal

    @property
    def concurrent(self) -> bool:
        """Whether statements may step out of program order."""
        return self.mode.is_concurrent

    @property
    def asynchronous(self) -> bool:
        """Whether communication goes through pending run-time terms."""
        return self.mode is SemanticsMode.ASYNC

    @property
    def flips_declassify(self) -> bool:
        """Whether visible declassifications read the value from the adversary side."""
        return self.view or self.mode is SemanticsMode.SIMULATOR_VIEW

    @property
    def flips_endorse(self) -> bool:
        """Whether visible endorsements write the value to the adversary side."""
        return self.mode is SemanticsMode.SIMULATOR_VIEW

    def is_malicious(self, host: Endpoint) -> bool:
        """Whether the adversary controls a host."""
        return host.is_host and self.env.is_malicious(host.name, self.attack)

    def leaks(self, expr: Declassify) -> bool:
        """Whether a declassification makes a secret value public."""
        return self.attack.label_is_secret(expr.from_label) and self.attack.label_is_public(expr.to_label)

    def taints(self, expr: Endorse) -> bool:
        """Whether an endorsement makes an untrusted value trusted."""
        return self.attack.label_is_untrusted(expr.from_label) and self.attack.label_is_trusted(expr.to_label)

    def with_mode(self, mode: SemanticsMode, *, view: bool | None = None) -> Semantics:
        """The same semantics under another mode."""
        flipped = self.view if view is None else view
        return Semantics(mode, self.env, self.attack, self.domain, self.synchronous, flipped)


#: The result of an expression step: an output or internal step with its value, or a wait for input.
ExprStep = Step[Value] | Demand[Value]


def _internal(host: Endpoint, value: Value, rule: str) -> Step[Value]:
    return Step(Action.internal(host), value, rule, host)


def _demand(sender: Endpoint, host: Endpoint, rule: str, channel_receiver: Endpoint | None = None) -> Demand[Value]:
    return Demand(Channel(sender, channel_receiver or host), host, rule, lambda value: value)


def expr_moves(sem: Semantics, host: Endpoint, expr: Expr) -> list[ExprStep]:
    """Every move of an expression evaluated at `host`, with input left as demands.

    Args:
        sem: The stepping discipline.
        host: Where the expression is evaluated.
        expr: The expression; must be closed.

    Returns:
        Output and internal steps carrying the resulting value, and demands for input. An expression
        with a free variable has no steps.

    """
    if any(isinstance(arg, Var) for arg in expr_args(expr)):
        return []
    match expr:
        case AtomExpr(arg=arg):
            return [_internal(host, arg, "E-Atomic")]  # type: ignore[arg-type]
        case OpExpr(op=op, args=args):
            return [_internal(host, eval_op(op, args), "E-Operator")]  # type: ignore[arg-type]
        case Declassify(arg=arg):
            value: Value = arg  # type: ignore[assignment]
            if sem.ideal or sem.flips_declassify:
                if sem.leaks(expr):
                    if sem.flips_declassify:
                        return [_demand(host, host, "E-Declassify-View", ADVERSARY)]
                    return [Step(Action.send(host, ADVERSARY, value), value, "E-Declassify", host)]
                return [_internal(host, value, "E-Declassify-Skip")]
            return [_internal(host, value, "E-Declassify-Real")]
        case Endorse(arg=arg):
            value = arg  # type: ignore[assignment]
            if sem.ideal and sem.taints(expr):
                return [_demand(ADVERSARY, host, "E-Endorse")]
            if sem.flips_endorse and sem.taints(expr):
                return [Step(Action.send(ADVERSARY, host, value), value, "E-Endorse-View", host)]
            return [_internal(host, value, "E-Endorse-Skip" if sem.ideal else "E-Endorse-Real")]
        case Input():
            if sem.is_malicious(host):
                return [_internal(host, UNIT, "E-Input-Malicious")]
            return [_demand(ENVIRONMENT, host, "E-Input")]
        case Output(arg=arg):
            if sem.is_malicious(host):
                return [_internal(host, UNIT, "E-Output-Malicious")]
            return [Step(Action.send(host, ENVIRONMENT, arg), UNIT, "E-Output", host)]  # type: ignore[arg-type]
        case Receive(peer=peer):
            if sem.ideal:
                return [_internal(host, UNIT, "E-Receive")]
            return [_demand(peer, host, "E-Receive-Real")]
        case Send(arg=arg, peer=peer):
            if sem.ideal:
                return [_internal(host, UNIT, "E-Send")]
            return [Step(Action.send(host, peer, arg), UNIT, "E-Send-Real", host)]  # type: ignore[arg-type]
        case _:
            assert_never(expr)


def expand(moves: Sequence[Step[T] | Demand[T]], domain: tuple[Value, ...]) -> list[Step[T]]:
    """Turn demands into one input step per acceptable value of the domain."""
    steps: list[Step[T]] = []
    for move in moves:
        if isinstance(move, Step):
            steps.append(move)
            continue
        for value in domain:
            if move.accepts(value):
                action = Action.receive(move.channel.sender, move.channel.receiver, value)
                steps.append(Step(action, move.resume(value), move.rule, move.host))
    return steps


def enabled_expr_steps(sem: Semantics, host: Endpoint, expr: Expr) -> list[Step[Value]]:
    """Every step an expression evaluated at `host` can take, inputs ranging over the value domain.

    Args:
        sem: The stepping discipline.
        host: Where the expression is evaluated.
        expr: The expression; must be closed.

    Returns:
        Steps pairing each enabled action with the value the expression evaluates to.

    """
    return expand(expr_moves(sem, host, expr), sem.domain)
