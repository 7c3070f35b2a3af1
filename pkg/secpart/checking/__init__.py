"""Static checks: information-flow typing and synchronization."""

from secpart.checking.diagnostics import Diagnostic, Report
from secpart.checking.sync_checker import (
    SyncChecker,
    SyncContext,
    check_sync,
    h_is_synched,
    h_reset,
    h_sync,
    is_external,
    is_outputting,
    unsynched_with,
)
from secpart.checking.type_checker import (
    Binding,
    TypeChecker,
    TypeContext,
    TypeReport,
    check_atomic,
    check_expr,
    check_stmt,
)

__all__ = [
    "Binding",
    "Diagnostic",
    "Report",
    "SyncChecker",
    "SyncContext",
    "TypeChecker",
    "TypeContext",
    "TypeReport",
    "check_atomic",
    "check_expr",
    "check_stmt",
    "check_sync",
    "h_is_synched",
    "h_reset",
    "h_sync",
    "is_external",
    "is_outputting",
    "unsynched_with",
]
