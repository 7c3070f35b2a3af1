"""Recursive-descent parser for program files."""

from __future__ import annotations

import logging
import re
from collections.abc import Callable, Collection
from dataclasses import dataclass

from secpart.enums import ProgramKind
from secpart.errors import LabelSyntaxError, ProgramSyntaxError, TierError
from secpart.labels import Label
from secpart.lang.analysis import alpha_rename, check_tier
from secpart.lang.ast import (
    SKIP,
    AtomExpr,
    Case,
    Declassify,
    Endorse,
    Expr,
    If,
    Input,
    Let,
    Move,
    OpExpr,
    Output,
    Position,
    Receive,
    Select,
    Send,
    Stmt,
)
from secpart.lang.operators import Operator
from secpart.lang.values import FALSE, TRUE, UNIT, WILDCARD, Atomic, Endpoint, IntValue, Value, Var

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"(?P<space>\s+|#[^\n]*)"
    r"|(?P<int>-?\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<sym>->|=>|[@=;.,(){}<>&|*])"
)

KEYWORDS = frozenset(
    {
        "let",
        "move",
        "select",
        "if",
        "else",
        "case",
        "declassify",
        "endorse",
        "input",
        "output",
        "recv",
        "send",
        "unit",
        "true",
        "false",
        "pending",
    }
)


@dataclass(frozen=True)
class Token:
    """A lexical token."""

    kind: str
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class Program:
    """A parsed program file."""

    #: The statement.
    stmt: Stmt

    #: The declared kind, or None when the file has no header.
    kind: ProgramKind | None = None

    #: The host a distributed program runs on.
    host: Endpoint | None = None


def tokenize(text: str) -> list[Token]:
    """Split a program text into tokens, dropping whitespace and comments.

    Raises:
        ProgramSyntaxError: On a character that starts no token.

    """
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ProgramSyntaxError(f"Unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup or ""
        if kind != "space":
            tokens.append(Token(kind, match.group(), line, pos - line_start + 1))
        newlines = match.group().count("\n")
        if newlines:
            line += newlines
            line_start = pos + match.group().rindex("\n") + 1
        pos = match.end()
    return tokens


# A pending sequence item: given the continuation, build the statement.
_Item = Callable[[Stmt], Stmt]


class _Parser:
    def __init__(self, text: str, hosts: Collection[str] | None) -> None:
        self._tokens = tokenize(text)
        self._pos = 0
        self._hosts = hosts

    # ----- token helpers -----

    def _peek(self, offset: int = 0) -> Token | None:
        index = self._pos + offset
        return self._tokens[index] if index < len(self._tokens) else None

    def _error(self, message: str, token: Token | None = None) -> ProgramSyntaxError:
        token = token or self._peek()
        if token is None:
            last = self._tokens[-1] if self._tokens else Token("", "", 1, 1)
            return ProgramSyntaxError(f"{message} at end of input", last.line, last.column + len(last.text))
        return ProgramSyntaxError(message, token.line, token.column)

    def _next(self) -> Token:
        token = self._peek()
        if token is None:
            raise self._error("Unexpected end of input")
        self._pos += 1
        return token

    def _expect(self, text: str) -> Token:
        token = self._peek()
        if token is None or token.text != text or token.kind == "int":
            found = "end of input" if token is None else repr(token.text)
            raise self._error(f"Expected {text!r}, found {found}")
        self._pos += 1
        return token

    def _at(self, text: str) -> bool:
        token = self._peek()
        return token is not None and token.text == text and token.kind != "int"

    def _ident(self) -> Token:
        token = self._next()
        if token.kind != "ident" or token.text in KEYWORDS:
            raise self._error(f"Expected identifier, found {token.text!r}", token)
        return token

    # ----- program -----

    def program(self) -> Program:
        kind: ProgramKind | None = None
        host: Endpoint | None = None
        while (token := self._peek()) is not None and token.text in ("kind", "host") and self._at_header():
            self._pos += 2
            value = self._next()
            if token.text == "kind":
                try:
                    kind = ProgramKind(value.text)
                except ValueError:
                    raise self._error(f"Unknown program kind {value.text!r}", value) from None
            else:
                host = self._host_from(value)
        items = self._items(until=None)
        return Program(_build(items, SKIP), kind, host)

    def _at_header(self) -> bool:
        follow = self._peek(1)
        return follow is not None and follow.text == "="

    def _items(self, until: str | None) -> list[_Item]:
        items: list[_Item] = []
        while (token := self._peek()) is not None and token.text != until:
            items.append(self._statement())
        return items

    def _block(self) -> list[_Item]:
        self._expect("{")
        items = self._items(until="}")
        self._expect("}")
        return items

    def _host_from(self, token: Token) -> Endpoint:
        if token.text == "*":
            return Endpoint.host("*")
        if token.kind != "ident" or token.text in KEYWORDS:
            raise self._error(f"Expected host, found {token.text!r}", token)
        if self._hosts is not None and token.text not in self._hosts:
            raise self._error(f"Unknown host {token.text!r}", token)
        return Endpoint.host(token.text)

    def _host(self) -> Endpoint:
        return self._host_from(self._next())

    # ----- statements -----

    def _statement(self) -> _Item:
        token = self._next()
        pos = Position(token.line, token.column)
        match token.text:
            case "let":
                var = self._next()
                if var.text != WILDCARD and (var.kind != "ident" or var.text in KEYWORDS):
                    raise self._error(f"Expected variable, found {var.text!r}", var)
                self._expect("@")
                host = self._host()
                self._expect("=")
                expr = self._expr()
                self._expect(";")
                return lambda body: Let(var.text, host, expr, body, pos)
            case "move":
                src = self._host()
                self._expect(".")
                arg = self._atomic()
                self._expect("->")
                dst = self._host()
                self._expect(".")
                var = self._ident()
                self._expect(";")
                return lambda body: Move(src, arg, dst, var.text, body, pos)
            case "select":
                src = self._host()
                self._expect(".")
                value = self._value(self._next())
                self._expect("->")
                dst = self._host()
                self._expect(";")
                return lambda body: Select(src, value, dst, body, pos)
            case "if":
                host = self._host()
                self._expect(".")
                guard = self._atomic()
                then = self._block()
                self._expect("else")
                orelse = self._block()
                return lambda body: If(guard, host, _build(then, body), _build(orelse, body), pos)
            case "case":
                src = self._host()
                self._expect("->")
                dst = self._host()
                self._expect("{")
                arms: list[tuple[Value, list[_Item]]] = []
                while not self._at("}"):
                    arm_token = self._next()
                    value = self._value(arm_token)
                    if any(value == seen for seen, _ in arms):
                        raise self._error(f"Duplicate case value {value}", arm_token)
                    self._expect("=>")
                    arms.append((value, self._block()))
                self._expect("}")
                if not arms:
                    raise self._error("case needs at least one branch", token)
                return lambda body: Case(src, dst, tuple((v, _build(arm, body)) for v, arm in arms), pos)
            case "pending":
                raise self._error("Run-time forms cannot appear in program text", token)
        raise self._error(f"Expected statement, found {token.text!r}", token)

    # ----- expressions -----

    def _expr(self) -> Expr:
        token = self._peek()
        if token is None:
            raise self._error("Expected expression")
        follow = self._peek(1)
        match token.text:
            case "declassify" | "endorse":
                self._pos += 1
                self._expect("(")
                arg = self._atomic()
                self._expect(",")
                from_label = self._label()
                self._expect(",")
                to_label = self._label()
                self._expect(")")
                cls = Declassify if token.text == "declassify" else Endorse
                return cls(arg, from_label, to_label)
            case "input":
                self._pos += 1
                self._expect("@")
                return Input(self._host())
            case "output":
                self._pos += 1
                self._expect("(")
                arg = self._atomic()
                self._expect(")")
                self._expect("@")
                return Output(arg, self._host())
            case "recv":
                self._pos += 1
                return Receive(self._host())
            case "send":
                self._pos += 1
                arg = self._atomic()
                self._expect("->")
                return Send(arg, self._host())
        if token.kind == "ident" and token.text not in KEYWORDS and follow is not None and follow.text == "(":
            self._pos += 2
            try:
                op = Operator.lookup(token.text)
            except KeyError:
                raise self._error(f"Unknown operator {token.text!r}", token) from None
            args = [self._atomic()]
            while self._at(","):
                self._pos += 1
                args.append(self._atomic())
            self._expect(")")
            if len(args) != op.arity:
                raise self._error(f"Operator {op.keyword} takes {op.arity} arguments, got {len(args)}", token)
            return OpExpr(op, tuple(args))
        return AtomExpr(self._atomic())

    def _atomic(self) -> Atomic:
        token = self._next()
        if token.kind == "ident" and token.text not in KEYWORDS:
            if token.text == WILDCARD:
                raise self._error("The wildcard cannot be read", token)
            return Var(token.text)
        return self._value(token)

    def _value(self, token: Token) -> Value:
        if token.kind == "int":
            return IntValue(int(token.text))
        literal = {"unit": UNIT, "true": TRUE, "false": FALSE}.get(token.text)
        if literal is None or token.kind != "ident":
            raise self._error(f"Expected value, found {token.text!r}", token)
        return literal

    def _label(self) -> Label:
        start = self._expect("<")
        parts = []
        while not self._at(">"):
            parts.append(self._next().text)
        self._expect(">")
        try:
            return Label.parse("<" + " ".join(parts) + ">")
        except LabelSyntaxError as exc:
            raise self._error(str(exc), start) from exc


def _build(items: list[_Item], tail: Stmt) -> Stmt:
    result = tail
    for item in reversed(items):
        result = item(result)
    return result


def parse_file(text: str, hosts: Collection[str] | None = None) -> Program:
    """Parse a program file, header included, and check it against its declared kind.

    Statements following a conditional are placed at the end of both branches, and binders are
    renamed so that no variable is rebound along a path.

    Args:
        text: The program text.
        hosts: Declared host names; unknown hosts are rejected when given.

    Returns:
        The parsed program.

    Raises:
        ProgramSyntaxError: On syntax errors, unknown hosts, unknown operators or arity mismatches.
        TierError: If the program uses constructs its kind forbids.

    """
    program = _Parser(text, hosts).program()
    stmt = alpha_rename(program.stmt)
    if program.kind is ProgramKind.DISTRIBUTED and program.host is None:
        raise TierError("A distributed program must declare `host = <name>`")
    if program.kind is not None:
        check_tier(stmt, program.kind, program.host)
    logger.debug("Parsed %s program", program.kind.value if program.kind else "untyped")
    return Program(stmt, program.kind, program.host)


def parse_program(text: str, hosts: Collection[str] | None = None) -> Stmt:
    """Parse a program text into its statement.

    Example:
        >>> parse_program("")
        Skip()

    """
    return parse_file(text, hosts).stmt
