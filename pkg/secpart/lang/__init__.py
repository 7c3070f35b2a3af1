"""Abstract syntax, parser and printer for every program tier."""

from secpart.lang.analysis import (
    alpha_equal,
    alpha_rename,
    bound_vars,
    check_tier,
    children,
    free_vars,
    hosts_mentioned,
    hosts_of_frame,
    input_sites,
    node_tier,
    statement_count,
    substitute,
    tier_of,
    walk,
    with_args,
)
from secpart.lang.ast import (
    SKIP,
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
    Position,
    Receive,
    Select,
    SelectPending,
    Send,
    Skip,
    Stmt,
)
from secpart.lang.operators import Operator, eval_op, is_truthy
from secpart.lang.parser import Program, parse_file, parse_program
from secpart.lang.printer import format_expr, format_program, pretty_print
from secpart.lang.values import (
    ADVERSARY,
    DEFAULT_DOMAIN,
    ENVIRONMENT,
    FALSE,
    IDEAL,
    TRUE,
    UNIT,
    WILDCARD,
    Atomic,
    BoolValue,
    Channel,
    Endpoint,
    IntValue,
    Opaque,
    UnitValue,
    Value,
    Var,
    endpoint_from_name,
    parse_domain,
    parse_value,
    value_from_json,
    value_sort_key,
    value_to_json,
)

__all__ = [
    "ADVERSARY",
    "DEFAULT_DOMAIN",
    "ENVIRONMENT",
    "FALSE",
    "IDEAL",
    "SKIP",
    "TRUE",
    "UNIT",
    "WILDCARD",
    "AtomExpr",
    "Atomic",
    "BoolValue",
    "Case",
    "Channel",
    "Declassify",
    "Endorse",
    "Endpoint",
    "Expr",
    "Frame",
    "If",
    "Input",
    "IntValue",
    "Let",
    "Move",
    "MovePending",
    "Opaque",
    "OpExpr",
    "Operator",
    "Output",
    "Position",
    "Program",
    "Receive",
    "Select",
    "SelectPending",
    "Send",
    "Skip",
    "Stmt",
    "UnitValue",
    "Value",
    "Var",
    "alpha_equal",
    "alpha_rename",
    "bound_vars",
    "check_tier",
    "children",
    "endpoint_from_name",
    "eval_op",
    "format_expr",
    "format_program",
    "free_vars",
    "hosts_mentioned",
    "hosts_of_frame",
    "input_sites",
    "is_truthy",
    "node_tier",
    "parse_domain",
    "parse_file",
    "parse_program",
    "parse_value",
    "pretty_print",
    "statement_count",
    "substitute",
    "tier_of",
    "value_from_json",
    "value_sort_key",
    "value_to_json",
    "walk",
    "with_args",
]
