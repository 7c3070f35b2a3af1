"""Syntactic low-equivalence of statements, decided by anti-unification and type checking."""

from __future__ import annotations

import dataclasses
import logging

from typing_extensions import assert_never

from secpart.checking.type_checker import Binding, check_stmt
from secpart.enums import LowView
from secpart.errors import ShapeMismatchError
from secpart.labels import EMPTY_ATTACK, WEAKEST, Attack, HostEnvironment, Label
from secpart.lang.analysis import bound_vars, expr_args, free_vars, with_args
from secpart.lang.ast import Case, Expr, If, Let, Move, MovePending, Select, SelectPending, Skip, Stmt
from secpart.lang.values import Atomic, Endpoint, Var
from secpart.utils import fresh_name

logger = logging.getLogger(__name__)


class _Different(Exception):
    """Two statements choose different branches or messages; no generalization exists."""


class AntiUnifier:
    """Generalizes two statements of the same shape, replacing every differing value by a fresh variable.

    Args:
        used: Names the fresh variables must avoid.

    """

    def __init__(self, used: set[str]) -> None:
        """Initialize with no fresh variables."""
        self.used = set(used)
        self.holes: dict[str, Endpoint] = {}

    def _hole(self, host: Endpoint) -> Var:
        name = fresh_name("hole", self.used)
        self.holes[name] = host
        return Var(name)

    def atom(self, a1: Atomic, a2: Atomic, host: Endpoint) -> Atomic:
        """Generalize two atomics used at `host`."""
        if a1 == a2:
            return a1
        if isinstance(a1, Var) or isinstance(a2, Var):
            raise ShapeMismatchError(f"{a1} and {a2} differ in more than their value")
        return self._hole(host)

    def expr(self, e1: Expr, e2: Expr, host: Endpoint) -> Expr:
        """Generalize two expressions evaluated at `host`."""
        args1, args2 = expr_args(e1), expr_args(e2)
        if len(args1) != len(args2) or with_args(e1, [Var("")] * len(args1)) != with_args(e2, [Var("")] * len(args2)):
            raise ShapeMismatchError(f"Expressions {e1} and {e2} differ in shape")
        return with_args(e1, [self.atom(a, b, host) for a, b in zip(args1, args2, strict=True)])

    def stmt(self, s1: Stmt, s2: Stmt) -> Stmt:
        """Generalize two statements.

        Raises:
            ShapeMismatchError: If they differ in anything but values.

        """
        if type(s1) is not type(s2):
            raise ShapeMismatchError(f"{type(s1).__name__} against {type(s2).__name__}")
        match s1:
            case Skip():
                return s1
            case Let(var=var, host=host, expr=expr, body=body):
                assert isinstance(s2, Let)
                self._same((var, host), (s2.var, s2.host))
                return dataclasses.replace(s1, expr=self.expr(expr, s2.expr, host), body=self.stmt(body, s2.body))
            case Move(src=src, arg=arg, dst=dst, var=var, body=body):
                assert isinstance(s2, Move)
                self._same((src, dst, var), (s2.src, s2.dst, s2.var))
                return dataclasses.replace(s1, arg=self.atom(arg, s2.arg, src), body=self.stmt(body, s2.body))
            case MovePending(src=src, value=value, dst=dst, var=var, body=body):
                assert isinstance(s2, MovePending)
                self._same((src, dst, var), (s2.src, s2.dst, s2.var))
                if value == s2.value:
                    return dataclasses.replace(s1, body=self.stmt(body, s2.body))
                return Move(src, self._hole(src), dst, var, self.stmt(body, s2.body))
            case Select(src=src, value=value, dst=dst, body=body) | SelectPending(
                src=src, value=value, dst=dst, body=body
            ):
                assert isinstance(s2, (Select, SelectPending))
                self._same((src, dst), (s2.src, s2.dst))
                if value != s2.value:
                    raise _Different(f"{src} selects {value} against {s2.value}")
                return dataclasses.replace(s1, body=self.stmt(body, s2.body))
            case If(guard=guard, host=host, then=then, orelse=orelse):
                assert isinstance(s2, If)
                self._same(host, s2.host)
                return dataclasses.replace(
                    s1,
                    guard=self.atom(guard, s2.guard, host),
                    then=self.stmt(then, s2.then),
                    orelse=self.stmt(orelse, s2.orelse),
                )
            case Case(src=src, dst=dst, branches=branches):
                assert isinstance(s2, Case)
                self._same((src, dst), (s2.src, s2.dst))
                if [v for v, _ in branches] != [v for v, _ in s2.branches]:
                    raise _Different(f"Case on {src}->{dst} offers different branches")
                merged = tuple((v, self.stmt(b1, b2)) for (v, b1), (_, b2) in zip(branches, s2.branches, strict=True))
                return dataclasses.replace(s1, branches=merged)
            case _:
                assert_never(s1)

    @staticmethod
    def _same(left: object, right: object) -> None:
        if left != right:
            raise ShapeMismatchError(f"{left} against {right}")


def hole_label(host: Endpoint, which: LowView, env: HostEnvironment, attack: Attack) -> Label | None:
    """The label a differing value at `host` is checked at, or `None` if none lies outside the view.

    Public equivalence treats the value as secret at the host's own label, which only exists when the
    host is secret. Trusted equivalence treats it as public and untrusted.
    """
    if which is LowView.TRUSTED:
        return Label(WEAKEST, WEAKEST)
    authority = env.label_of(host)
    return authority if attack.label_is_secret(authority) else None


def low_equivalent(
    s1: Stmt,
    s2: Stmt,
    which: LowView,
    env: HostEnvironment,
    attack: Attack = EMPTY_ATTACK,
) -> bool:
    """Whether two closed statements agree on everything the view can see.

    The statements are anti-unified; the generalization must type check when every introduced variable
    carries a label outside the view.

    Args:
        s1: The first statement.
        s2: The second statement.
        which: Public or trusted equivalence.
        env: Host labels.
        attack: Decides which labels are public and which are trusted.

    Returns:
        Whether the statements are equivalent.

    Raises:
        ShapeMismatchError: If the statements differ in anything but values.

    """
    unifier = AntiUnifier(bound_vars(s1) | bound_vars(s2) | free_vars(s1) | free_vars(s2))
    try:
        general = unifier.stmt(s1, s2)
    except _Different as exc:
        logger.debug("Not %s-equivalent: %s", which.value, exc)
        return False
    context: dict[str, Binding] = {}
    for name, host in unifier.holes.items():
        label = hole_label(host, which, env, attack)
        if label is None:
            logger.debug("Not %s-equivalent: values differ at %s, which the view sees", which.value, host)
            return False
        context[name] = Binding(host, label)
    report = check_stmt(context, general, env, attack)
    if not report.ok:
        logger.debug("Not %s-equivalent: %s", which.value, report.diagnostics[0])
    return report.ok
