"""Canonical source program of a choreography."""

from __future__ import annotations

import dataclasses

from typing_extensions import assert_never

from secpart.errors import TierError
from secpart.lang.analysis import substitute
from secpart.lang.ast import Case, If, Let, Move, MovePending, Receive, Select, SelectPending, Send, Skip, Stmt, is_io
from secpart.lang.values import IDEAL


def source_of(s: Stmt) -> Stmt:
    """Collapse a choreography onto the ideal host.

    IO keeps its host, every other computation moves to `*`, moves become substitutions and
    selections disappear.

    Args:
        s: A choreography without `recv`/`send` and run-time forms.

    Returns:
        The source program the choreography implements.

    Raises:
        TierError: If the statement is outside the choreography tier.

    """
    match s:
        case Skip():
            return s
        case Let(expr=expr, body=body):
            if isinstance(expr, (Receive, Send)):
                raise TierError("Choreographies with recv/send have no canonical source program")
            host = s.host if is_io(expr) else IDEAL
            return dataclasses.replace(s, host=host, body=source_of(body))
        case Move(arg=arg, var=var, body=body):
            return source_of(substitute(body, var, arg))
        case Select(body=body):
            return source_of(body)
        case If(then=then, orelse=orelse):
            return dataclasses.replace(s, host=IDEAL, then=source_of(then), orelse=source_of(orelse))
        case Case() | MovePending() | SelectPending():
            raise TierError(f"{type(s).__name__} has no canonical source program")
        case _:
            assert_never(s)
