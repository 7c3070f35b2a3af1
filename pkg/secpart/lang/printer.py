"""Pretty printer producing text the parser reads back."""

from __future__ import annotations

from typing_extensions import assert_never

from secpart.enums import ProgramKind
from secpart.lang.ast import (
    AtomExpr,
    Case,
    Declassify,
    Endorse,
    Expr,
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
)
from secpart.lang.values import Endpoint

_INDENT = "    "


def format_expr(expr: Expr) -> str:
    """Render an expression."""
    match expr:
        case AtomExpr(arg=arg):
            return str(arg)
        case OpExpr(op=op, args=args):
            return f"{op.keyword}({', '.join(str(a) for a in args)})"
        case Declassify(arg=arg, from_label=src, to_label=dst):
            return f"declassify({arg}, {src}, {dst})"
        case Endorse(arg=arg, from_label=src, to_label=dst):
            return f"endorse({arg}, {src}, {dst})"
        case Input(host=host):
            return f"input @ {host}"
        case Output(arg=arg, host=host):
            return f"output({arg}) @ {host}"
        case Receive(peer=peer):
            return f"recv {peer}"
        case Send(arg=arg, peer=peer):
            return f"send {arg} -> {peer}"
        case _:
            assert_never(expr)


def _lines(s: Stmt, depth: int) -> list[str]:
    pad = _INDENT * depth
    lines: list[str] = []
    while True:
        match s:
            case Skip():
                return lines
            case Let(var=var, host=host, expr=expr, body=body):
                lines.append(f"{pad}let {var} @ {host} = {format_expr(expr)};")
            case Move(src=src, arg=arg, dst=dst, var=var, body=body):
                lines.append(f"{pad}move {src}.{arg} -> {dst}.{var};")
            case Select(src=src, value=value, dst=dst, body=body):
                lines.append(f"{pad}select {src}.{value} -> {dst};")
            case MovePending(src=src, value=value, dst=dst, var=var, body=body):
                lines.append(f"{pad}pending move {src}.{value} -> {dst}.{var};")
            case SelectPending(src=src, value=value, dst=dst, body=body):
                lines.append(f"{pad}pending select {src}.{value} -> {dst};")
            case If(guard=guard, host=host, then=then, orelse=orelse):
                lines.append(f"{pad}if {host}.{guard} {{")
                lines.extend(_lines(then, depth + 1))
                lines.append(f"{pad}}} else {{")
                lines.extend(_lines(orelse, depth + 1))
                lines.append(f"{pad}}}")
                return lines
            case Case(src=src, dst=dst, branches=branches):
                lines.append(f"{pad}case {src} -> {dst} {{")
                for value, branch in branches:
                    lines.append(f"{pad}{_INDENT}{value} => {{")
                    lines.extend(_lines(branch, depth + 2))
                    lines.append(f"{pad}{_INDENT}}}")
                lines.append(f"{pad}}}")
                return lines
            case _:
                assert_never(s)
        s = body


def pretty_print(s: Stmt) -> str:
    """Render a statement in the concrete syntax; `Skip` renders as the empty program."""
    lines = _lines(s, 0)
    return "\n".join(lines) + "\n" if lines else ""


def format_program(s: Stmt, kind: ProgramKind, host: Endpoint | None = None) -> str:
    """Render a statement with its program-file header."""
    header = f"kind = {kind.value}\n"
    if host is not None:
        header += f"host = {host}\n"
    return f"{header}\n{pretty_print(s)}"
