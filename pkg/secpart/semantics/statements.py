"""Statement stepping: head rules, out-of-order lifting and asynchronous communication."""

from __future__ import annotations

import dataclasses
import logging
from collections.abc import Callable
from functools import partial

from typing_extensions import assert_never

from secpart.errors import NotEnabledError, StuckBranchError
from secpart.lang.analysis import hosts_of_frame, substitute, with_body
from secpart.lang.ast import Case, If, Let, Move, MovePending, Select, SelectPending, Skip, Stmt
from secpart.lang.operators import is_truthy
from secpart.lang.values import WILDCARD, Channel, Endpoint, Value, Var
from secpart.semantics.actions import Action, Demand, Step, base_rule
from secpart.semantics.rules import Semantics, expand, expr_moves

logger = logging.getLogger(__name__)

#: An enabled statement step, or a statement waiting for a message.
StmtMove = Step[Stmt] | Demand[Stmt]


def bind(body: Stmt, var: str, value: Value) -> Stmt:
    """Substitute a received or computed value for a binder."""
    return body if var == WILDCARD else substitute(body, var, value)


def head_moves(sem: Semantics, s: Stmt) -> list[StmtMove]:
    """Moves of the first statement, in program order."""
    match s:
        case Skip():
            return []
        case Let(var=var, host=host, expr=expr, body=body):
            moves: list[StmtMove] = []
            for move in expr_moves(sem, host, expr):
                if isinstance(move, Step):
                    moves.append(Step(move.action, bind(body, var, move.target), move.rule, move.host))
                else:
                    moves.append(move.map(lambda value: bind(body, var, value)))
            return moves
        case Move(src=src, arg=arg, dst=dst, var=var, body=body):
            if isinstance(arg, Var):
                return []
            if sem.ideal:
                return [Step(Action.internal(src), bind(body, var, arg), "S-Communicate", src)]
            if sem.asynchronous:
                pending = MovePending(src, arg, dst, var, body)
                return [Step(Action.send(src, dst, arg), pending, "S-Communicate-Send", src)]
            return [Step(Action.send(src, dst, arg), bind(body, var, arg), "S-Communicate-Real", src)]
        case Select(src=src, value=value, dst=dst, body=body):
            if sem.ideal:
                return [Step(Action.internal(src), body, "S-Select", src)]
            if sem.asynchronous:
                return [Step(Action.send(src, dst, value), SelectPending(src, value, dst, body), "S-Select-Send", src)]
            return [Step(Action.send(src, dst, value), body, "S-Select-Real", src)]
        case MovePending(value=value, dst=dst, var=var, body=body):
            return [Step(Action.internal(dst), bind(body, var, value), "S-Communicate-Receive", dst)]
        case SelectPending(dst=dst, body=body):
            return [Step(Action.internal(dst), body, "S-Select-Receive", dst)]
        case If(guard=guard, host=host, then=then, orelse=orelse):
            if isinstance(guard, Var):
                return []
            return [Step(Action.internal(host), then if is_truthy(guard) else orelse, "S-If", host)]
        case Case(src=src, dst=dst):
            branches = s.branch_map
            return [Demand(Channel(src, dst), dst, "S-Case", branches.__getitem__, branches.__contains__)]
        case _:
            assert_never(s)


# ===== Concurrent lifting =====


def _blocked(sem: Semantics, frame_hosts: frozenset[Endpoint], move: StmtMove) -> bool:
    if move.host in frame_hosts:
        return True
    if sem.synchronous:
        channel = move.action.channel if isinstance(move, Step) else move.channel
        return channel.sender in frame_hosts or channel.receiver in frame_hosts
    return False


def _lift(move: StmtMove, wrap: Callable[[Stmt], Stmt], rule: str) -> StmtMove:
    named = f"{rule}:{base_rule(move.rule)}"
    if isinstance(move, Step):
        return Step(move.action, wrap(move.target), named, move.host)
    return move.map(wrap, named)


def _key(move: StmtMove) -> tuple[object, ...]:
    if isinstance(move, Step):
        return ("step", move.action, move.host)
    return ("demand", move.channel, move.host)


def _join(s: If, left: StmtMove, right: StmtMove) -> StmtMove:
    rule = f"S-If-Delay:{base_rule(left.rule)}"
    if isinstance(left, Step) and isinstance(right, Step):
        return Step(left.action, dataclasses.replace(s, then=left.target, orelse=right.target), rule, left.host)
    assert isinstance(left, Demand) and isinstance(right, Demand)
    return Demand(
        left.channel,
        left.host,
        rule,
        lambda value: dataclasses.replace(s, then=left.resume(value), orelse=right.resume(value)),
        lambda value: left.accepts(value) and right.accepts(value),
    )


def _moves(sem: Semantics, s: Stmt, stuck: list[StmtMove] | None) -> list[StmtMove]:
    moves = head_moves(sem, s)
    if not sem.concurrent:
        return moves
    match s:
        case Let(body=body) | Move(body=body) | Select(body=body) | MovePending(body=body) | SelectPending(body=body):
            frame_hosts = hosts_of_frame(s)
            wrap = partial(with_body, s)
            inner = (m for m in _moves(sem, body, stuck) if not _blocked(sem, frame_hosts, m))
            moves.extend(_lift(m, wrap, "S-Delay") for m in inner)
        case If(host=host, then=then, orelse=orelse):
            right = {_key(m): m for m in _moves(sem, orelse, stuck) if m.host != host}
            for left in _moves(sem, then, stuck):
                if left.host == host:
                    continue
                match = right.pop(_key(left), None)
                if match is None:
                    if stuck is not None:
                        stuck.append(left)
                    continue
                moves.append(_join(s, left, match))
            if stuck is not None:
                stuck.extend(right.values())
    return moves


def stmt_moves(sem: Semantics, s: Stmt) -> list[StmtMove]:
    """Every move of a closed statement, with inputs left as demands."""
    return _moves(sem, s, None)


def enabled_stmt_steps(sem: Semantics, s: Stmt) -> list[Step[Stmt]]:
    """Every step a closed statement can take, inputs ranging over the value domain.

    Sequential modes step only the first statement. Concurrent modes also step a statement past
    earlier ones whose hosts it does not involve, and step into both branches of a conditional when
    both take the same action.

    Args:
        sem: The stepping discipline.
        s: The statement.

    Returns:
        Steps pairing each enabled action with its successor.

    """
    return expand(stmt_moves(sem, s), sem.domain)


def _matches(move: StmtMove, action: Action) -> bool:
    if isinstance(move, Step):
        return move.action == action
    return action.is_input and action.channel == move.channel and move.accepts(action.message.value)


def step_stmt(sem: Semantics, s: Stmt, action: Action) -> Stmt:
    """Take the step labeled `action`.

    Raises:
        StuckBranchError: If only one branch of a delayed conditional can take the action.
        NotEnabledError: If the action is not enabled otherwise.

    """
    stuck: list[StmtMove] = []
    for move in _moves(sem, s, stuck):
        if _matches(move, action):
            return move.resume(action.message.value) if isinstance(move, Demand) else move.target
    if any(_matches(move, action) for move in stuck):
        logger.debug("Stuck delayed branch on %s", action)
        raise StuckBranchError(f"{action} is enabled in only one branch of a delayed conditional")
    raise NotEnabledError(f"{action} is not enabled")
