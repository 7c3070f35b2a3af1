"""The labeled transition system: ideal, real, asynchronous and simulator stepping."""

from secpart.lang.operators import eval_op
from secpart.semantics.actions import (
    Action,
    Demand,
    Message,
    Step,
    Trace,
    base_rule,
    env_restrict,
    format_trace,
    trace_from_json,
    trace_to_json,
)
from secpart.semantics.buffer import EMPTY_BUFFER, Buffer
from secpart.semantics.configuration import (
    Configuration,
    deliver,
    enabled_config_steps,
    explore,
    output_on,
    reachable,
    ready_channels,
    step_config,
)
from secpart.semantics.process import (
    ProcessState,
    buffers_input,
    enabled_process_outputs,
    process_outputs,
    step_process,
)
from secpart.semantics.rules import Semantics, enabled_expr_steps, expand, expr_moves
from secpart.semantics.statements import bind, enabled_stmt_steps, head_moves, step_stmt, stmt_moves

__all__ = [
    "EMPTY_BUFFER",
    "Action",
    "Buffer",
    "Configuration",
    "Demand",
    "Message",
    "ProcessState",
    "Semantics",
    "Step",
    "Trace",
    "base_rule",
    "bind",
    "buffers_input",
    "deliver",
    "enabled_config_steps",
    "enabled_expr_steps",
    "enabled_process_outputs",
    "enabled_stmt_steps",
    "env_restrict",
    "eval_op",
    "expand",
    "explore",
    "expr_moves",
    "format_trace",
    "head_moves",
    "output_on",
    "process_outputs",
    "reachable",
    "ready_channels",
    "step_config",
    "step_process",
    "step_stmt",
    "stmt_moves",
    "trace_from_json",
    "trace_to_json",
]
