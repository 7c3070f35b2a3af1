"""Removing the code of malicious hosts."""

from __future__ import annotations

import dataclasses
import logging

from typing_extensions import assert_never

from secpart.errors import MaliciousIfError, TierError
from secpart.labels import Attack, HostEnvironment
from secpart.lang.ast import Case, If, Let, Move, MovePending, Receive, Select, SelectPending, Send, Skip, Stmt
from secpart.lang.values import WILDCARD, Endpoint

logger = logging.getLogger(__name__)


class Corruptor:
    """Rewrites a choreography as the adversary sees it once it controls the malicious hosts.

    Statements of nonmalicious hosts stay, statements of malicious hosts go, and communication between
    the two becomes direct `send`/`recv` with the malicious end.
    """

    def __init__(self, env: HostEnvironment, attack: Attack) -> None:
        """Initialize with the hosts and the attack."""
        self.env = env
        self.attack = attack
        self.malicious = env.malicious_hosts(attack)

    def trusted(self, host: Endpoint) -> bool:
        """Whether a statement host survives corruption."""
        return host.name not in self.malicious

    def corrupt(self, s: Stmt) -> Stmt:
        """Corrupt a statement.

        Raises:
            MaliciousIfError: If a conditional is guarded at a malicious host.
            TierError: On distributed or run-time forms.

        """
        match s:
            case Skip():
                return s
            case Let(host=host, body=body):
                rest = self.corrupt(body)
                return dataclasses.replace(s, body=rest) if self.trusted(host) else rest
            case Move(src=src, arg=arg, dst=dst, var=var, body=body):
                rest = self.corrupt(body)
                if self.trusted(src) and self.trusted(dst):
                    return dataclasses.replace(s, body=rest)
                if self.trusted(src):
                    return Let(WILDCARD, src, Send(arg, dst), rest, s.pos)
                if self.trusted(dst):
                    return Let(var, dst, Receive(src), rest, s.pos)
                return rest
            case Select(src=src, value=value, dst=dst, body=body):
                rest = self.corrupt(body)
                if self.trusted(src) and self.trusted(dst):
                    return dataclasses.replace(s, body=rest)
                if self.trusted(src):
                    return Let(WILDCARD, src, Send(value, dst), rest, s.pos)
                return rest
            case If(host=host, then=then, orelse=orelse):
                if not self.trusted(host):
                    raise MaliciousIfError(f"Conditional at malicious host {host}")
                return dataclasses.replace(s, then=self.corrupt(then), orelse=self.corrupt(orelse))
            case Case() | MovePending() | SelectPending():
                raise TierError(f"Cannot corrupt {type(s).__name__}; corrupt the choreography before running it")
            case _:
                assert_never(s)


def corrupt_stmt(s: Stmt, env: HostEnvironment, attack: Attack) -> Stmt:
    """Return the choreography with the malicious hosts' code erased.

    Args:
        s: A well-typed choreography.
        env: Host labels.
        attack: Decides which hosts are malicious.

    Returns:
        The corrupted choreography.

    Raises:
        MaliciousIfError: If a conditional is guarded at a malicious host.

    """
    corruptor = Corruptor(env, attack)
    if corruptor.malicious:
        logger.debug("Corrupting hosts %s", sorted(corruptor.malicious))
    return corruptor.corrupt(s)
