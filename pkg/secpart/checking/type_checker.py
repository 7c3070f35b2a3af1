"""Information-flow type checking of choreographies and source programs."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

from typing_extensions import assert_never

from secpart.checking.diagnostics import Report
from secpart.labels import EMPTY_ATTACK, PUBLIC_TRUSTED, Attack, HostEnvironment, Label
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
    Position,
    Receive,
    Select,
    SelectPending,
    Send,
    Skip,
    Stmt,
)
from secpart.lang.values import IDEAL, WILDCARD, Atomic, Endpoint, Var

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Binding:
    """Where a variable lives and how it is labeled."""

    host: Endpoint
    label: Label


#: Variable name to binding.
TypeContext = Mapping[str, Binding]


@dataclass
class TypeReport(Report):
    """Diagnostics plus the label assigned to every binder."""

    #: Final bindings of every variable the checker met.
    bindings: dict[str, Binding] = field(default_factory=dict)


class TypeChecker:
    """Checks statements against the information-flow rules.

    Every `Let` and `Move` binder gets the least label satisfying the rule premises: the label of the
    expression joined with the integrity of the storing host. Checking goes on after a failure, so one
    run reports every failing premise.

    Args:
        env: Host labels.
        attack: Used only to decide whether `recv`/`send` peers are malicious.
        stored_labels: Optional labels for individual binders. An annotated label must be at least as
            restrictive as the principal one and within the storing host's authority.

    """

    def __init__(
        self,
        env: HostEnvironment,
        attack: Attack = EMPTY_ATTACK,
        stored_labels: Mapping[str, Label] | None = None,
    ) -> None:
        """Initialize the checker."""
        self.env = env
        self.attack = attack
        self.stored_labels = dict(stored_labels or {})

    def host_label(self, host: Endpoint) -> Label:
        """The authority label of a statement host."""
        return self.env.label_of(host)

    # ===== Atomics and expressions =====

    def atomic_label(
        self, ctx: TypeContext, host: Endpoint, arg: Atomic, report: Report, pos: Position | None = None
    ) -> Label:
        """Least label of an atomic used at `host`, recording failures in `report`."""
        if not isinstance(arg, Var):
            return PUBLIC_TRUSTED
        binding = ctx.get(arg.name)
        if binding is None:
            report.add("Lbl-Variable", f"Unbound variable {arg.name}", pos)
            return PUBLIC_TRUSTED
        if binding.host != host and IDEAL not in (binding.host, host):
            report.add("Lbl-Variable", f"Variable {arg.name} lives at {binding.host} but is used at {host}", pos)
        return binding.label

    def _require_flow(
        self,
        rule: str,
        ctx: TypeContext,
        host: Endpoint,
        arg: Atomic,
        bound: Label,
        report: Report,
        pos: Position | None,
    ) -> None:
        actual = self.atomic_label(ctx, host, arg, report, pos)
        if not actual.flows_to(bound):
            report.add(rule, f"{arg} at {actual} does not flow to {bound}", pos)

    def expr_label(
        self, ctx: TypeContext, host: Endpoint, expr: Expr, report: Report, pos: Position | None = None
    ) -> Label:
        """Least label of an expression evaluated at `host`, recording failed premises in `report`."""
        match expr:
            case AtomExpr(arg=arg):
                return self.atomic_label(ctx, host, arg, report, pos)
            case OpExpr(args=args):
                result = PUBLIC_TRUSTED
                for arg in args:
                    result = result.join(self.atomic_label(ctx, host, arg, report, pos))
                return result
            case Declassify(arg=arg, from_label=src, to_label=dst):
                self._require_flow("Lbl-Declassify", ctx, host, arg, src, report, pos)
                if src.integ != dst.integ:
                    report.add("Lbl-Declassify", f"Declassification may not change integrity: {src} to {dst}", pos)
                self._require_uncompromised("Lbl-Declassify", src, dst, report, pos)
                return dst
            case Endorse(arg=arg, from_label=src, to_label=dst):
                self._require_flow("Lbl-Endorse", ctx, host, arg, src, report, pos)
                if src.conf != dst.conf:
                    report.add("Lbl-Endorse", f"Endorsement may not change confidentiality: {src} to {dst}", pos)
                self._require_uncompromised("Lbl-Endorse", src, dst, report, pos)
                return dst
            case Input(host=io_host):
                if io_host != host:
                    report.add("Lbl-Input", f"Input at {io_host} evaluated at {host}", pos)
                return self.host_label(io_host)
            case Output(arg=arg, host=io_host):
                if io_host != host:
                    report.add("Lbl-Output", f"Output at {io_host} evaluated at {host}", pos)
                self._require_flow("Lbl-Output", ctx, host, arg, self.host_label(io_host), report, pos)
                return PUBLIC_TRUSTED
            case Receive(peer=peer):
                self._require_malicious_peer("Lbl-Receive", peer, report, pos)
                return self.host_label(peer).integ_projection
            case Send(arg=arg, peer=peer):
                self._require_malicious_peer("Lbl-Send", peer, report, pos)
                self._require_flow("Lbl-Send", ctx, host, arg, self.host_label(peer).conf_projection, report, pos)
                return PUBLIC_TRUSTED
            case _:
                assert_never(expr)

    def _require_uncompromised(self, rule: str, src: Label, dst: Label, report: Report, pos: Position | None) -> None:
        for which, label in (("source", src), ("target", dst)):
            if not label.uncompromised:
                report.add(rule, f"The {which} label {label} is compromised", pos)

    def _require_malicious_peer(self, rule: str, peer: Endpoint, report: Report, pos: Position | None) -> None:
        if not peer.is_host or not self.env.is_malicious(peer.name, self.attack):
            report.add(rule, f"Direct communication with {peer} is only allowed for malicious peers", pos)

    # ===== Statements =====

    def _store(
        self,
        rule: str,
        var: str,
        host: Endpoint,
        least: Label,
        ctx: dict[str, Binding],
        report: TypeReport,
        pos: Position | None,
    ) -> None:
        authority = self.host_label(host)
        label = least.join(authority.integ_projection)
        annotated = self.stored_labels.get(var)
        if annotated is not None:
            if not label.flows_to(annotated):
                report.add(rule, f"Annotated label {annotated} of {var} is below the computed {label}", pos)
            label = annotated
        if not authority.acts_for(label):
            report.add(rule, f"Host {host} at {authority} lacks the authority to store {var} at {label}", pos)
        if var != WILDCARD:
            ctx[var] = Binding(host, label)
            report.bindings[var] = ctx[var]

    def check(self, s: Stmt, ctx: TypeContext | None = None) -> TypeReport:
        """Check a statement.

        Args:
            s: The statement, choreography or source tier.
            ctx: Bindings of free variables.

        Returns:
            The diagnostics and the binder labels.

        """
        report = TypeReport()
        self._check(s, dict(ctx or {}), report)
        if report.ok:
            logger.debug("Statement type checks")
        else:
            logger.info("Type checking found %d problem(s)", len(report.diagnostics))
        return report

    def _check(self, s: Stmt, ctx: dict[str, Binding], report: TypeReport) -> None:
        while True:
            match s:
                case Skip():
                    return
                case Let(var=var, host=host, expr=expr, body=body, pos=pos):
                    least = self.expr_label(ctx, host, expr, report, pos)
                    self._store("Lbl-Let", var, host, least, ctx, report, pos)
                    s = body
                case Move(src=src, arg=arg, dst=dst, var=var, body=body, pos=pos):
                    least = self.atomic_label(ctx, src, arg, report, pos)
                    self._store("Lbl-Communicate", var, dst, least, ctx, report, pos)
                    s = body
                case MovePending(dst=dst, var=var, body=body):
                    self._store("Lbl-Communicate", var, dst, PUBLIC_TRUSTED, ctx, report, None)
                    s = body
                case Select(src=src, dst=dst, body=body, pos=pos):
                    self._check_select(src, dst, report, pos)
                    s = body
                case SelectPending(src=src, dst=dst, body=body):
                    self._check_select(src, dst, report, None)
                    s = body
                case If(guard=guard, host=host, then=then, orelse=orelse, pos=pos):
                    self._require_flow("Lbl-If", ctx, host, guard, PUBLIC_TRUSTED, report, pos)
                    self._check(then, dict(ctx), report)
                    self._check(orelse, dict(ctx), report)
                    return
                case Case(pos=pos):
                    report.add("Lbl-Tier", "case only appears in distributed programs", pos)
                    return
                case _:
                    assert_never(s)

    def _check_select(self, src: Endpoint, dst: Endpoint, report: Report, pos: Position | None) -> None:
        src_integ, dst_integ = self.host_label(src).integ, self.host_label(dst).integ
        if not src_integ.acts_for(dst_integ):
            report.add("Lbl-Select", f"{src} is less trusted than {dst} and may not select its branch", pos)


def check_atomic(ctx: TypeContext, host: Endpoint, arg: Atomic, label: Label, env: HostEnvironment) -> bool:
    """Return whether an atomic used at `host` checks at `label`."""
    report = Report()
    actual = TypeChecker(env).atomic_label(ctx, host, arg, report)
    return report.ok and actual.flows_to(label)


def check_expr(
    ctx: TypeContext,
    host: Endpoint,
    expr: Expr,
    label: Label,
    env: HostEnvironment,
    attack: Attack = EMPTY_ATTACK,
) -> bool:
    """Return whether an expression evaluated at `host` checks at `label`."""
    report = Report()
    least = TypeChecker(env, attack).expr_label(ctx, host, expr, report)
    return report.ok and least.flows_to(label)


def check_stmt(
    ctx: TypeContext | None,
    s: Stmt,
    env: HostEnvironment,
    attack: Attack = EMPTY_ATTACK,
    stored_labels: Mapping[str, Label] | None = None,
) -> TypeReport:
    """Type check a statement under the given context."""
    return TypeChecker(env, attack, stored_labels).check(s, ctx)
