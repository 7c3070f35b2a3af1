"""Synchronization checking: external outputs happen in program order under any schedule."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from typing_extensions import assert_never

from secpart.checking.diagnostics import Report
from secpart.enums import SyncInit
from secpart.errors import HostEnvironmentError
from secpart.labels import EMPTY_ATTACK, STRONGEST, WEAKEST, Attack, HostEnvironment, Principal
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

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SyncContext:
    """Integrity of the best bundle of communication paths between every ordered pair of hosts.

    `paths[(h1, h2)]` is the integrity with which `h2` knows that `h1` has reached its current point.
    """

    #: Host integrity, in declaration order.
    integrity: Mapping[str, Principal]

    #: Path integrity for every ordered pair of declared hosts.
    paths: Mapping[tuple[str, str], Principal]

    @classmethod
    def initial(cls, env: HostEnvironment, init: SyncInit = SyncInit.TOP) -> SyncContext:
        """Build the starting context: every pair synchronized, or every host reset."""
        integrity = {h: env.label(h).integ for h in env}
        context = cls(integrity, {(a, b): STRONGEST for a in integrity for b in integrity})
        if init is SyncInit.RESET:
            for host in integrity:
                context = h_reset(context, host)
        return context

    def __getitem__(self, pair: tuple[str, str]) -> Principal:
        """Path integrity from `pair[0]` to `pair[1]`."""
        return self.paths[pair]

    def __eq__(self, other: object) -> bool:
        """Contexts are equal when their path tables are."""
        return isinstance(other, SyncContext) and dict(self.paths) == dict(other.paths)

    def __hash__(self) -> int:
        """Hash the path table."""
        return hash(frozenset(self.paths.items()))

    def require(self, *hosts: str) -> None:
        """Raise for undeclared hosts.

        Raises:
            HostEnvironmentError: If a host is unknown.

        """
        for host in hosts:
            if host not in self.integrity:
                raise HostEnvironmentError(f"Unknown host {host!r}")


def h_sync(sctx: SyncContext, h1: str, h2: str) -> SyncContext:
    """Account for a message from `h1` to `h2`.

    Every path into `h1` extends to `h2` through `h2` itself, and joins the paths already reaching `h2`.
    """
    sctx.require(h1, h2)
    paths = dict(sctx.paths)
    for source in sctx.integrity:
        paths[(source, h2)] = sctx[(source, h2)] & (sctx[(source, h1)] | sctx.integrity[h2])
    return SyncContext(sctx.integrity, paths)


def h_reset(sctx: SyncContext, h: str) -> SyncContext:
    """Account for an external action at `h`: no other host knows `h` performed it yet."""
    sctx.require(h)
    paths = dict(sctx.paths)
    for target in sctx.integrity:
        paths[(h, target)] = WEAKEST
    paths[(h, h)] = sctx.integrity[h]
    return SyncContext(sctx.integrity, paths)


def unsynched_with(sctx: SyncContext, h: str) -> list[str]:
    """Hosts `h` has not heard from with enough integrity since their last external action."""
    sctx.require(h)
    return [
        other for other in sctx.integrity if not sctx[(other, h)].acts_for(sctx.integrity[other] | sctx.integrity[h])
    ]


def h_is_synched(sctx: SyncContext, h: str) -> bool:
    """Whether `h` may perform an external output."""
    return not unsynched_with(sctx, h)


def is_external(expr: Expr, host: str, env: HostEnvironment, attack: Attack) -> bool:
    """Whether evaluating `expr` at `host` talks to the environment or the adversary under ideal stepping."""
    match expr:
        case Input() | Output():
            return not env.is_malicious(host, attack)
        case Declassify(from_label=src, to_label=dst):
            return attack.label_is_secret(src) and attack.label_is_public(dst)
        case Endorse(from_label=src, to_label=dst):
            return attack.label_is_untrusted(src) and attack.label_is_trusted(dst)
        case AtomExpr() | OpExpr() | Receive() | Send():
            return False
        case _:
            assert_never(expr)


def is_outputting(expr: Expr) -> bool:
    """Whether an external step of `expr` is an output."""
    return isinstance(expr, (Output, Declassify))


class SyncChecker:
    """Checks that every external output is synchronized with every earlier external action.

    Args:
        env: Host labels.
        attack: Decides which IO and downgrades are external.

    """

    def __init__(self, env: HostEnvironment, attack: Attack = EMPTY_ATTACK) -> None:
        """Initialize the checker."""
        self.env = env
        self.attack = attack

    def check(self, s: Stmt, sctx: SyncContext | None = None) -> Report:
        """Check a choreography, reporting the first unsynchronized output."""
        report = Report()
        self._check(s, sctx or SyncContext.initial(self.env), report)
        if not report.ok:
            logger.info("Synchronization check failed: %s", report.diagnostics[0])
        return report

    def contexts(self, s: Stmt, sctx: SyncContext) -> Iterable[tuple[Stmt, SyncContext]]:
        """Yield every statement along every path with the context it is checked in."""
        yield s, sctx
        match s:
            case Let(host=host, expr=expr, body=body):
                after = h_reset(sctx, host.name) if is_external(expr, host.name, self.env, self.attack) else sctx
                yield from self.contexts(body, after)
            case Move(src=src, dst=dst, body=body) | MovePending(src=src, dst=dst, body=body):
                yield from self.contexts(body, h_sync(sctx, src.name, dst.name))
            case Select(src=src, dst=dst, body=body) | SelectPending(src=src, dst=dst, body=body):
                yield from self.contexts(body, h_sync(sctx, src.name, dst.name))
            case If(then=then, orelse=orelse):
                yield from self.contexts(then, sctx)
                yield from self.contexts(orelse, sctx)
            case Case(branches=branches):
                for _, branch in branches:
                    yield from self.contexts(branch, sctx)
            case Skip():
                pass
            case _:
                assert_never(s)

    def _check(self, s: Stmt, sctx: SyncContext, report: Report) -> None:
        for stmt, context in self.contexts(s, sctx):
            if not isinstance(stmt, Let) or not is_external(stmt.expr, stmt.host.name, self.env, self.attack):
                continue
            if is_outputting(stmt.expr):
                behind = unsynched_with(context, stmt.host.name)
                if behind:
                    report.add(
                        "Sync-External",
                        f"Output at {stmt.host} is not synchronized with {', '.join(behind)}"
                        f" (pairs {', '.join(f'{b}->{stmt.host}' for b in behind)})",
                        stmt.pos,
                    )
                    return


def check_sync(
    sctx0: SyncContext | None,
    s: Stmt,
    env: HostEnvironment,
    attack: Attack = EMPTY_ATTACK,
) -> Report:
    """Check synchronization of a choreography starting from `sctx0` (all synchronized by default)."""
    return SyncChecker(env, attack).check(s, sctx0)
