"""The fixed operator table and its denotation."""

from __future__ import annotations

from collections.abc import Sequence
from enum import Enum

from typing_extensions import assert_never

from secpart.lang.values import FALSE, BoolValue, IntValue, Opaque, UnitValue, Value


class Operator(Enum):
    """A primitive operator, written by name in programs."""

    #: Integer addition, wrapping on overflow.
    ADD = ("add", "+", 2)

    #: Integer subtraction, wrapping on overflow.
    SUB = ("sub", "-", 2)

    #: Integer multiplication, wrapping on overflow.
    MUL = ("mul", "*", 2)

    #: Integer comparison.
    LT = ("lt", "<", 2)

    #: Structural equality.
    EQ = ("eq", "==", 2)

    #: Boolean conjunction.
    AND = ("and", "&&", 2)

    #: Boolean disjunction.
    OR = ("or", "||", 2)

    #: Boolean negation.
    NOT = ("not", "!", 1)

    def __init__(self, keyword: str, symbol: str, arity: int) -> None:
        """Unpack the table entry."""
        self.keyword = keyword
        self.symbol = symbol
        self.arity = arity

    @classmethod
    def lookup(cls, name: str) -> Operator:
        """Find an operator by keyword or symbol.

        Raises:
            KeyError: If no operator has that name.

        """
        for op in cls:
            if name in (op.keyword, op.symbol):
                return op
        raise KeyError(name)


def _as_int(value: Value) -> int:
    if isinstance(value, IntValue):
        return value.value
    if isinstance(value, BoolValue):
        return int(value.value)
    return 0


def _as_bool(value: Value) -> bool:
    if isinstance(value, BoolValue):
        return value.value
    if isinstance(value, IntValue):
        return value.value != 0
    return not isinstance(value, UnitValue)


def eval_op(op: Operator | str, values: Sequence[Value]) -> Value:
    """Apply an operator to argument values.

    Operators are total: integer operators read booleans as 0/1 and unit as 0, boolean operators
    read non-zero integers as true, and arithmetic wraps around 64 bits. Any hidden argument gives a
    hidden result.

    Args:
        op: The operator or its keyword/symbol.
        values: Argument values; their number must match the arity.

    Returns:
        The result value.

    Raises:
        ValueError: If the number of arguments does not match the arity.

    Example:
        >>> eval_op("<", [IntValue(5), IntValue(7)])
        BoolValue(value=True)

    """
    operator = Operator.lookup(op) if isinstance(op, str) else op
    if len(values) != operator.arity:
        raise ValueError(f"Operator {operator.keyword} takes {operator.arity} arguments, got {len(values)}")
    hidden = [v for v in values if isinstance(v, Opaque)]
    if hidden:
        return Opaque("+".join(v.origin for v in hidden))
    match operator:
        case Operator.ADD:
            return IntValue(_as_int(values[0]) + _as_int(values[1]))
        case Operator.SUB:
            return IntValue(_as_int(values[0]) - _as_int(values[1]))
        case Operator.MUL:
            return IntValue(_as_int(values[0]) * _as_int(values[1]))
        case Operator.LT:
            return BoolValue(_as_int(values[0]) < _as_int(values[1]))
        case Operator.EQ:
            return BoolValue(values[0] == values[1])
        case Operator.AND:
            return BoolValue(_as_bool(values[0]) and _as_bool(values[1]))
        case Operator.OR:
            return BoolValue(_as_bool(values[0]) or _as_bool(values[1]))
        case Operator.NOT:
            return BoolValue(not _as_bool(values[0]))
        case _:
            assert_never(operator)


def is_truthy(value: Value) -> bool:
    """Guard test of conditionals: everything except `false` selects the first branch."""
    return value != FALSE
