"""Structural queries and rewrites over the AST."""

from __future__ import annotations

import dataclasses
from collections import Counter
from collections.abc import Callable, Iterator, Sequence

from typing_extensions import assert_never

from secpart.enums import ProgramKind, Tier
from secpart.errors import TierError
from secpart.lang.ast import (
    AtomExpr,
    Case,
    Declassify,
    Endorse,
    Expr,
    Frame,
    If,
    Input,
    Let,
    Move,
    MovePending,
    OpExpr,
    Output,
    Receive,
    Select,
    SelectPending,
    Send,
    Skip,
    Stmt,
    is_io,
)
from secpart.lang.values import IDEAL, WILDCARD, Atomic, Endpoint, Value, Var
from secpart.utils import fresh_name

# ===== Variables =====


def atomic_vars(arg: Atomic) -> set[str]:
    """Variables an atomic mentions."""
    return {arg.name} if isinstance(arg, Var) else set()


def expr_args(expr: Expr) -> tuple[Atomic, ...]:
    """The atomic arguments of an expression."""
    match expr:
        case OpExpr(args=args):
            return args
        case AtomExpr(arg=arg) | Declassify(arg=arg) | Endorse(arg=arg) | Output(arg=arg) | Send(arg=arg):
            return (arg,)
        case Input() | Receive():
            return ()
        case _:
            assert_never(expr)


def with_args(expr: Expr, args: Sequence[Atomic]) -> Expr:
    """The expression with its atomic arguments replaced, in order."""
    match expr:
        case OpExpr():
            return dataclasses.replace(expr, args=tuple(args))
        case AtomExpr() | Declassify() | Endorse() | Output() | Send():
            (arg,) = args
            return dataclasses.replace(expr, arg=arg)
        case Input() | Receive():
            return expr
        case _:
            assert_never(expr)


def expr_free_vars(expr: Expr) -> set[str]:
    """Variables an expression reads."""
    return set().union(*(atomic_vars(a) for a in expr_args(expr)))


def free_vars(s: Stmt) -> set[str]:
    """Return the variables a statement reads without binding them first."""
    match s:
        case Skip():
            return set()
        case Let(var=var, expr=expr, body=body):
            return expr_free_vars(expr) | (free_vars(body) - {var})
        case Move(arg=arg, var=var, body=body):
            return atomic_vars(arg) | (free_vars(body) - {var})
        case MovePending(var=var, body=body):
            return free_vars(body) - {var}
        case Select(body=body) | SelectPending(body=body):
            return free_vars(body)
        case If(guard=guard, then=then, orelse=orelse):
            return atomic_vars(guard) | free_vars(then) | free_vars(orelse)
        case Case(branches=branches):
            return set().union(*(free_vars(b) for _, b in branches))
        case _:
            assert_never(s)


def bound_vars(s: Stmt) -> set[str]:
    """Every variable bound anywhere in the statement, wildcard excluded."""
    names: set[str] = set()
    for node in walk(s):
        if isinstance(node, (Let, Move, MovePending)) and node.var != WILDCARD:
            names.add(node.var)
    return names


def substitute_atomic(arg: Atomic, var: str, value: Atomic) -> Atomic:
    """Replace a variable occurrence."""
    return value if isinstance(arg, Var) and arg.name == var else arg


def substitute_expr(expr: Expr, var: str, value: Atomic) -> Expr:
    """Replace every occurrence of `var` in an expression."""
    match expr:
        case OpExpr(op=op, args=args):
            return OpExpr(op, tuple(substitute_atomic(a, var, value) for a in args))
        case AtomExpr() | Declassify() | Endorse() | Output() | Send():
            return dataclasses.replace(expr, arg=substitute_atomic(expr.arg, var, value))
        case Input() | Receive():
            return expr
        case _:
            assert_never(expr)


def substitute(s: Stmt, var: str, value: Atomic) -> Stmt:
    """Replace free occurrences of `var` by `value`, stopping where `var` is rebound.

    Args:
        s: The statement.
        var: The variable to replace.
        value: A value, or a variable when renaming.

    Returns:
        The statement after substitution.

    """
    if var == WILDCARD:
        return s
    match s:
        case Skip():
            return s
        case Let(var=bound, expr=expr, body=body):
            new_body = body if bound == var else substitute(body, var, value)
            return dataclasses.replace(s, expr=substitute_expr(expr, var, value), body=new_body)
        case Move(arg=arg, var=bound, body=body):
            new_body = body if bound == var else substitute(body, var, value)
            return dataclasses.replace(s, arg=substitute_atomic(arg, var, value), body=new_body)
        case MovePending(var=bound, body=body):
            return s if bound == var else dataclasses.replace(s, body=substitute(body, var, value))
        case Select(body=body) | SelectPending(body=body):
            return dataclasses.replace(s, body=substitute(body, var, value))
        case If(guard=guard, then=then, orelse=orelse):
            return dataclasses.replace(
                s,
                guard=substitute_atomic(guard, var, value),
                then=substitute(then, var, value),
                orelse=substitute(orelse, var, value),
            )
        case Case(branches=branches):
            return dataclasses.replace(s, branches=tuple((v, substitute(b, var, value)) for v, b in branches))
        case _:
            assert_never(s)


# ===== Traversal =====


def walk(s: Stmt) -> Iterator[Stmt]:
    """Yield every statement node, pre-order."""
    yield s
    for child in children(s):
        yield from walk(child)


def children(s: Stmt) -> tuple[Stmt, ...]:
    """The immediate sub-statements."""
    match s:
        case Skip():
            return ()
        case Let(body=body) | Move(body=body) | Select(body=body) | MovePending(body=body) | SelectPending(body=body):
            return (body,)
        case If(then=then, orelse=orelse):
            return (then, orelse)
        case Case(branches=branches):
            return tuple(b for _, b in branches)
        case _:
            assert_never(s)


def with_body(frame: Frame, body: Stmt) -> Stmt:
    """Return the frame with its continuation replaced."""
    return dataclasses.replace(frame, body=body)


def map_branches(s: If | Case, fn: Callable[[Stmt], Stmt]) -> Stmt:
    """Apply `fn` to every branch of a conditional."""
    if isinstance(s, If):
        return dataclasses.replace(s, then=fn(s.then), orelse=fn(s.orelse))
    return dataclasses.replace(s, branches=tuple((v, fn(b)) for v, b in s.branches))


def hosts_of_frame(frame: Frame) -> frozenset[Endpoint]:
    """Hosts that must take part before anything after the frame may step.

    A `Let` involves its host, communication involves both ends, and a pending
    communication only its receiver.
    """
    match frame:
        case Let(host=host):
            return frozenset({host})
        case Move(src=src, dst=dst) | Select(src=src, dst=dst):
            return frozenset({src, dst})
        case MovePending(dst=dst) | SelectPending(dst=dst):
            return frozenset({dst})
        case _:
            assert_never(frame)


def node_hosts(node: Stmt) -> frozenset[Endpoint]:
    """Host annotations on a single node, communication peers included."""
    match node:
        case Let(host=host, expr=Input(host=other) | Output(host=other)):
            return frozenset({host, other})
        case Let(host=host, expr=Receive(peer=other) | Send(peer=other)):
            return frozenset({host, other})
        case Let(host=host) | If(host=host):
            return frozenset({host})
        case Move(src=src, dst=dst) | Select(src=src, dst=dst) | Case(src=src, dst=dst):
            return frozenset({src, dst})
        case MovePending(src=src, dst=dst) | SelectPending(src=src, dst=dst):
            return frozenset({src, dst})
    return frozenset()


def hosts_mentioned(s: Stmt) -> frozenset[Endpoint]:
    """Every host annotation in the statement, communication peers included."""
    return frozenset().union(*(node_hosts(node) for node in walk(s)))


def statement_count(s: Stmt) -> int:
    """Number of statement nodes other than `Skip`."""
    return sum(1 for node in walk(s) if not isinstance(node, Skip))


def input_sites(s: Stmt) -> Counter[Endpoint]:
    """How many environment inputs each host may read along the longest path."""
    match s:
        case Skip():
            return Counter()
        case Let(expr=Input(host=host), body=body):
            return Counter({host: 1}) + input_sites(body)
        case Let(body=body) | Move(body=body) | Select(body=body) | MovePending(body=body) | SelectPending(body=body):
            return input_sites(body)
        case If() | Case():
            result: Counter[Endpoint] = Counter()
            for child in children(s):
                result |= input_sites(child)
            return result
        case _:
            assert_never(s)


# ===== Tiers =====


def node_tier(s: Stmt) -> Tier:
    """The tier a single node belongs to."""
    if isinstance(s, Let):
        if s.host == IDEAL or is_io(s.expr):
            return max(Tier.SOURCE, s.expr.tier, key=lambda t: t.value)
        return max(Tier.CHOREOGRAPHY, s.expr.tier, key=lambda t: t.value)
    return s.tier


def tier_of(s: Stmt) -> Tier:
    """The highest tier of any node in the statement."""
    return max((node_tier(node) for node in walk(s)), key=lambda t: t.value)


def check_tier(s: Stmt, kind: ProgramKind, host: Endpoint | None = None) -> None:
    """Reject constructs a program of the given kind may not contain.

    Args:
        s: The program.
        kind: The declared program kind.
        host: For distributed programs, the host the program runs on.

    Raises:
        TierError: Naming the first offending construct.

    """
    for node in walk(s):
        if isinstance(node, (MovePending, SelectPending)):
            raise TierError("Run-time forms cannot appear in programs")
        match kind:
            case ProgramKind.SOURCE:
                _check_source_node(node)
            case ProgramKind.CHOREOGRAPHY:
                _check_choreography_node(node)
            case ProgramKind.DISTRIBUTED:
                _check_distributed_node(node, host)


def _check_source_node(node: Stmt) -> None:
    if isinstance(node, (Move, Select, Case)):
        raise TierError(f"{type(node).__name__.lower()} is not allowed in a source program")
    if isinstance(node, Let):
        if isinstance(node.expr, (Receive, Send)):
            raise TierError("recv/send are not allowed in a source program")
        if is_io(node.expr):
            if node.host != node.expr.host:
                raise TierError(f"IO at {node.expr.host} must be bound at {node.expr.host}, not {node.host}")
        elif node.host != IDEAL:
            raise TierError(f"Let {node.var} must be hosted at * in a source program")
    if isinstance(node, If) and node.host != IDEAL:
        raise TierError("Conditionals must be hosted at * in a source program")


def _check_choreography_node(node: Stmt) -> None:
    if isinstance(node, Case):
        raise TierError("case is not allowed in a choreography")
    if IDEAL in node_hosts(node):
        raise TierError("The ideal host * cannot appear in a choreography")
    if isinstance(node, Let) and is_io(node.expr) and node.host != node.expr.host:
        raise TierError(f"IO at {node.expr.host} must be bound at {node.expr.host}, not {node.host}")


def _check_distributed_node(node: Stmt, host: Endpoint | None) -> None:
    if isinstance(node, (Move, Select)):
        raise TierError(f"{type(node).__name__.lower()} is not allowed in a distributed program")
    if host is None:
        return
    owner = {Let: "host", If: "host", Case: "dst"}.get(type(node))
    if owner is not None and getattr(node, owner) != host:
        raise TierError(f"Statement at {getattr(node, owner)} inside the program of {host}")


# ===== Renaming =====


def alpha_rename(s: Stmt) -> Stmt:
    """Rename binders so no variable is rebound along any path.

    Sibling branches may keep binding the same name. The wildcard is left alone.
    """
    used = bound_vars(s) | free_vars(s)
    return _rename(s, frozenset(), used)


def _rename(s: Stmt, scope: frozenset[str], used: set[str]) -> Stmt:
    match s:
        case Let(var=var, body=body) | Move(var=var, body=body) | MovePending(var=var, body=body):
            if var != WILDCARD and var in scope:
                new = fresh_name(var, used)
                body = substitute(body, var, Var(new))
                var = new
            inner = scope | {var} if var != WILDCARD else scope
            return dataclasses.replace(s, var=var, body=_rename(body, inner, used))
        case Select(body=body) | SelectPending(body=body):
            return dataclasses.replace(s, body=_rename(body, scope, used))
        case If() | Case():
            return map_branches(s, lambda branch: _rename(branch, scope, used))
        case Skip():
            return s
        case _:
            assert_never(s)


def alpha_equal(s1: Stmt, s2: Stmt) -> bool:
    """Whether two statements are equal up to the names of bound variables."""
    return _alpha_eq(s1, s2, {}, {})


def _atom_eq(a1: Atomic, a2: Atomic, left: dict[str, str], right: dict[str, str]) -> bool:
    if isinstance(a1, Var) and isinstance(a2, Var):
        return left.get(a1.name, a1.name) == right.get(a2.name, a2.name) and (
            (a1.name in left) == (a2.name in right)
        )
    return a1 == a2


def _expr_eq(e1: Expr, e2: Expr, left: dict[str, str], right: dict[str, str]) -> bool:
    if type(e1) is not type(e2):
        return False
    args1, args2 = expr_args(e1), expr_args(e2)
    if len(args1) != len(args2) or not all(_atom_eq(a, b, left, right) for a, b in zip(args1, args2, strict=True)):
        return False
    plain1 = dataclasses.replace(e1, **_blank_args(e1))
    plain2 = dataclasses.replace(e2, **_blank_args(e2))
    return plain1 == plain2


def _blank_args(expr: Expr) -> dict[str, object]:
    if isinstance(expr, OpExpr):
        return {"args": ()}
    if isinstance(expr, (Input, Receive)):
        return {}
    return {"arg": Var("")}


def _alpha_eq(s1: Stmt, s2: Stmt, left: dict[str, str], right: dict[str, str]) -> bool:
    if type(s1) is not type(s2):
        return False
    match s1, s2:
        case Skip(), Skip():
            return True
        case Let(), Let():
            if s1.host != s2.host or not _expr_eq(s1.expr, s2.expr, left, right):
                return False
            return _alpha_eq(s1.body, s2.body, *_bind(s1.var, s2.var, left, right))
        case Move(), Move():
            if (s1.src, s1.dst) != (s2.src, s2.dst) or not _atom_eq(s1.arg, s2.arg, left, right):
                return False
            return _alpha_eq(s1.body, s2.body, *_bind(s1.var, s2.var, left, right))
        case MovePending(), MovePending():
            if (s1.src, s1.value, s1.dst) != (s2.src, s2.value, s2.dst):
                return False
            return _alpha_eq(s1.body, s2.body, *_bind(s1.var, s2.var, left, right))
        case Select(), Select():
            return (s1.src, s1.value, s1.dst) == (s2.src, s2.value, s2.dst) and _alpha_eq(
                s1.body, s2.body, left, right
            )
        case SelectPending(), SelectPending():
            return (s1.src, s1.value, s1.dst) == (s2.src, s2.value, s2.dst) and _alpha_eq(
                s1.body, s2.body, left, right
            )
        case If(), If():
            return (
                s1.host == s2.host
                and _atom_eq(s1.guard, s2.guard, left, right)
                and _alpha_eq(s1.then, s2.then, left, right)
                and _alpha_eq(s1.orelse, s2.orelse, left, right)
            )
        case Case(), Case():
            if (s1.src, s1.dst) != (s2.src, s2.dst) or [v for v, _ in s1.branches] != [v for v, _ in s2.branches]:
                return False
            return all(
                _alpha_eq(b1, b2, left, right) for (_, b1), (_, b2) in zip(s1.branches, s2.branches, strict=True)
            )
    return False


def _bind(v1: str, v2: str, left: dict[str, str], right: dict[str, str]) -> tuple[dict[str, str], dict[str, str]]:
    marker = f"#{len(left)}:{v1}:{v2}"
    return {**left, v1: marker}, {**right, v2: marker}


def value_atoms(s: Stmt) -> Iterator[Value]:
    """Yield every literal value in the statement, pre-order."""
    for node in walk(s):
        match node:
            case Let(expr=expr):
                yield from (a for a in expr_args(expr) if not isinstance(a, Var))
            case Move(arg=arg) | If(guard=arg):
                if not isinstance(arg, Var):
                    yield arg
            case Select(value=value) | MovePending(value=value) | SelectPending(value=value):
                yield value
            case Case(branches=branches):
                yield from (v for v, _ in branches)
