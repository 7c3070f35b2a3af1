"""Abstract syntax shared by source programs, choreographies, distributed programs and run-time terms.

Statements are in continuation-passing form: every statement except `If`, `Case` and `Skip` carries the
statement that follows it in `body`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar

from secpart.enums import Tier
from secpart.errors import DuplicateBranchError
from secpart.labels import Label
from secpart.lang.operators import Operator
from secpart.lang.values import Atomic, Endpoint, Value, value_sort_key


@dataclass(frozen=True)
class Position:
    """A 1-based line and column in a program text."""

    line: int
    column: int

    def __str__(self) -> str:
        """Render as `line:column`."""
        return f"{self.line}:{self.column}"


# ===== Expressions =====


@dataclass(frozen=True)
class AtomExpr:
    """An atomic expression evaluating to a value or a variable's value."""

    tier: ClassVar[Tier] = Tier.SOURCE

    arg: Atomic


@dataclass(frozen=True)
class OpExpr:
    """Application of a primitive operator to atomic arguments."""

    tier: ClassVar[Tier] = Tier.SOURCE

    op: Operator
    args: tuple[Atomic, ...]


@dataclass(frozen=True)
class Declassify:
    """Explicit confidentiality downgrade from one label to another."""

    tier: ClassVar[Tier] = Tier.SOURCE

    arg: Atomic
    from_label: Label
    to_label: Label


@dataclass(frozen=True)
class Endorse:
    """Explicit integrity upgrade from one label to another."""

    tier: ClassVar[Tier] = Tier.SOURCE

    arg: Atomic
    from_label: Label
    to_label: Label


@dataclass(frozen=True)
class Input:
    """Read a value from the environment at a host."""

    tier: ClassVar[Tier] = Tier.SOURCE

    host: Endpoint


@dataclass(frozen=True)
class Output:
    """Write a value to the environment at a host."""

    tier: ClassVar[Tier] = Tier.SOURCE

    arg: Atomic
    host: Endpoint


@dataclass(frozen=True)
class Receive:
    """Receive a value from another host."""

    tier: ClassVar[Tier] = Tier.CHOREOGRAPHY

    peer: Endpoint


@dataclass(frozen=True)
class Send:
    """Send a value to another host."""

    tier: ClassVar[Tier] = Tier.CHOREOGRAPHY

    arg: Atomic
    peer: Endpoint


Expr = AtomExpr | OpExpr | Declassify | Endorse | Input | Output | Receive | Send


def is_io(expr: Expr) -> bool:
    """Whether the expression talks to the environment."""
    return isinstance(expr, (Input, Output))


# ===== Statements =====


@dataclass(frozen=True)
class Skip:
    """The finished statement."""

    tier: ClassVar[Tier] = Tier.SOURCE

    pos: Position | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Let:
    """Evaluate an expression at a host and bind the result."""

    tier: ClassVar[Tier] = Tier.SOURCE

    var: str
    host: Endpoint
    expr: Expr
    body: Stmt
    pos: Position | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Move:
    """Copy an atomic value from one host to a fresh variable on another."""

    tier: ClassVar[Tier] = Tier.CHOREOGRAPHY

    src: Endpoint
    arg: Atomic
    dst: Endpoint
    var: str
    body: Stmt
    pos: Position | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Select:
    """Tell another host which branch was taken."""

    tier: ClassVar[Tier] = Tier.CHOREOGRAPHY

    src: Endpoint
    value: Value
    dst: Endpoint
    body: Stmt
    pos: Position | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    """Branch at a host on an atomic guard."""

    tier: ClassVar[Tier] = Tier.SOURCE

    guard: Atomic
    host: Endpoint
    then: Stmt
    orelse: Stmt
    pos: Position | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Case:
    """Branch on a value received from another host."""

    tier: ClassVar[Tier] = Tier.DISTRIBUTED

    src: Endpoint
    dst: Endpoint
    branches: tuple[tuple[Value, Stmt], ...]
    pos: Position | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        """Keep branches sorted by value and reject duplicates."""
        ordered = tuple(sorted(self.branches, key=lambda item: value_sort_key(item[0])))
        keys = [value for value, _ in ordered]
        if len(set(keys)) != len(keys):
            raise DuplicateBranchError(f"Duplicate case values in {[str(k) for k in keys]}")
        object.__setattr__(self, "branches", ordered)

    @property
    def branch_map(self) -> dict[Value, Stmt]:
        """The branches as a mapping."""
        return dict(self.branches)


@dataclass(frozen=True)
class MovePending:
    """A move whose value was sent but not yet received."""

    tier: ClassVar[Tier] = Tier.RUNTIME

    src: Endpoint
    value: Value
    dst: Endpoint
    var: str
    body: Stmt


@dataclass(frozen=True)
class SelectPending:
    """A selection sent but not yet received."""

    tier: ClassVar[Tier] = Tier.RUNTIME

    src: Endpoint
    value: Value
    dst: Endpoint
    body: Stmt


Stmt = Skip | Let | Move | Select | If | Case | MovePending | SelectPending

#: Statements with a single continuation, the evaluation contexts of concurrent stepping.
Frame = Let | Move | Select | MovePending | SelectPending

SKIP = Skip()
