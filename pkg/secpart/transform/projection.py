"""Endpoint projection of choreographies onto hosts."""

from __future__ import annotations

import dataclasses
import json
import logging
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from pathlib import Path

from typing_extensions import assert_never

from secpart.enums import ProgramKind
from secpart.errors import MergeFailureError, TierError
from secpart.labels import Attack, HostEnvironment
from secpart.lang.ast import (
    AtomExpr,
    Case,
    If,
    Let,
    Move,
    MovePending,
    Receive,
    Select,
    SelectPending,
    Send,
    Skip,
    Stmt,
)
from secpart.lang.parser import parse_file
from secpart.lang.printer import format_program
from secpart.lang.values import WILDCARD, Channel, Endpoint, Value, value_from_json
from secpart.semantics.buffer import EMPTY_BUFFER, Buffer

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


@dataclass(frozen=True)
class HostProgram:
    """One host's share of a distributed program."""

    #: The host's statement.
    stmt: Stmt

    #: Messages already waiting for the host.
    buffer: Buffer = EMPTY_BUFFER


@dataclass(frozen=True, eq=False)
class DistributedProgram:
    """A program per host, in host declaration order."""

    #: Host name to its program.
    programs: Mapping[str, HostProgram]

    def __post_init__(self) -> None:
        """Freeze the mapping into a plain dict copy."""
        object.__setattr__(self, "programs", dict(self.programs))

    def __eq__(self, other: object) -> bool:
        """Equal when every host has the same statement and buffer."""
        return isinstance(other, DistributedProgram) and dict(self.programs) == dict(other.programs)

    def __hash__(self) -> int:
        """Hash the programs."""
        return hash(tuple(self.programs.items()))

    def __iter__(self) -> Iterator[str]:
        """Iterate host names."""
        return iter(self.programs)

    def __getitem__(self, host: str) -> HostProgram:
        """The program of a host."""
        return self.programs[host]

    def write(self, directory: str | Path) -> Path:
        """Write one program file per host plus a manifest.

        Args:
            directory: Target directory, created if missing.

        Returns:
            The manifest path.

        """
        root = Path(directory)
        root.mkdir(parents=True, exist_ok=True)
        manifest: dict[str, dict[str, object]] = {}
        for host, program in self.programs.items():
            filename = f"{host}.prog"
            (root / filename).write_text(format_program(program.stmt, ProgramKind.DISTRIBUTED, Endpoint.host(host)))
            manifest[host] = {"file": filename, "buffer": program.buffer.to_dict()}
        path = root / MANIFEST
        path.write_text(json.dumps({"hosts": manifest}, indent=2) + "\n")
        logger.info("Wrote %d host programs to %s", len(manifest), root)
        return path

    @classmethod
    def load(cls, directory: str | Path) -> DistributedProgram:
        """Read a directory written by `write`."""
        root = Path(directory)
        manifest = json.loads((root / MANIFEST).read_text())
        programs = {}
        for host, entry in manifest["hosts"].items():
            parsed = parse_file((root / entry["file"]).read_text())
            buffer = Buffer.of(
                (Channel.parse(channel), [value_from_json(v) for v in values])
                for channel, values in entry.get("buffer", {}).items()
            )
            programs[host] = HostProgram(parsed.stmt, buffer)
        return cls(programs)


# ===== Merge =====


def merge(s1: Stmt, s2: Stmt) -> Stmt:
    """Unify the projections of two branches for a host that does not know the guard.

    Identical structure merges congruently; `case` statements on the same channel merge their branch
    maps, recursively merging branches both sides have.

    Raises:
        MergeFailureError: If the two statements cannot be unified.

    """
    match s1, s2:
        case Skip(), Skip():
            return s1
        case Let(), Let() if (s1.var, s1.host, s1.expr) == (s2.var, s2.host, s2.expr):
            return dataclasses.replace(s1, body=merge(s1.body, s2.body))
        case Move(), Move() if (s1.src, s1.arg, s1.dst, s1.var) == (s2.src, s2.arg, s2.dst, s2.var):
            return dataclasses.replace(s1, body=merge(s1.body, s2.body))
        case Select(), Select() if (s1.src, s1.value, s1.dst) == (s2.src, s2.value, s2.dst):
            return dataclasses.replace(s1, body=merge(s1.body, s2.body))
        case MovePending(), MovePending() if (s1.src, s1.value, s1.dst, s1.var) == (s2.src, s2.value, s2.dst, s2.var):
            return dataclasses.replace(s1, body=merge(s1.body, s2.body))
        case SelectPending(), SelectPending() if (s1.src, s1.value, s1.dst) == (s2.src, s2.value, s2.dst):
            return dataclasses.replace(s1, body=merge(s1.body, s2.body))
        case If(), If() if (s1.guard, s1.host) == (s2.guard, s2.host):
            return dataclasses.replace(s1, then=merge(s1.then, s2.then), orelse=merge(s1.orelse, s2.orelse))
        case Case(), Case() if (s1.src, s1.dst) == (s2.src, s2.dst):
            branches = s1.branch_map
            for value, branch in s2.branches:
                branches[value] = merge(branches[value], branch) if value in branches else branch
            return Case(s1.src, s1.dst, tuple(branches.items()), s1.pos)
    raise MergeFailureError(f"Cannot merge {type(s1).__name__} with {type(s2).__name__}")


def refines(s: Stmt, t: Stmt) -> bool:
    """Whether `t` equals `s` except that its `case` statements may have extra branches."""
    match s, t:
        case Case(), Case():
            if (s.src, s.dst) != (t.src, t.dst):
                return False
            theirs = t.branch_map
            return all(value in theirs and refines(branch, theirs[value]) for value, branch in s.branches)
        case If(), If():
            return (s.guard, s.host) == (t.guard, t.host) and refines(s.then, t.then) and refines(s.orelse, t.orelse)
        case Skip(), Skip():
            return True
        case (Let() | Move() | Select() | MovePending() | SelectPending()), _:
            if type(s) is not type(t):
                return False
            head_s = dataclasses.replace(s, body=Skip())
            head_t = dataclasses.replace(t, body=Skip())  # type: ignore[arg-type]
            return head_s == head_t and refines(s.body, t.body)  # type: ignore[union-attr]
    return False


# ===== Projection =====


def project(s: Stmt, host: Endpoint) -> Stmt:
    """Return the part of a choreography that runs on `host`.

    Args:
        s: A choreography, possibly corrupted or partially executed.
        host: The host to project onto.

    Returns:
        The host's distributed program.

    Raises:
        MergeFailureError: If the branches of a conditional `host` does not know cannot be unified.

    """
    match s:
        case Skip():
            return s
        case Let(host=owner, body=body):
            rest = project(body, host)
            return dataclasses.replace(s, body=rest) if owner == host else rest
        case Move(src=src, arg=arg, dst=dst, var=var, body=body):
            rest = project(body, host)
            if src == dst == host:
                return Let(var, host, AtomExpr(arg), rest, s.pos)
            if host == src:
                return Let(WILDCARD, src, Send(arg, dst), rest, s.pos)
            if host == dst:
                return Let(var, dst, Receive(src), rest, s.pos)
            return rest
        case Select(src=src, value=value, dst=dst, body=body):
            rest = project(body, host)
            if host == src and host != dst:
                return Let(WILDCARD, src, Send(value, dst), rest, s.pos)
            if host == dst and host != src:
                return Case(src, dst, ((value, rest),), s.pos)
            return rest
        case MovePending(src=src, dst=dst, var=var, body=body):
            rest = project(body, host)
            return Let(var, dst, Receive(src), rest) if host == dst else rest
        case SelectPending(src=src, value=value, dst=dst, body=body):
            rest = project(body, host)
            return Case(src, dst, ((value, rest),)) if host == dst else rest
        case If(host=owner, then=then, orelse=orelse):
            if owner == host:
                return dataclasses.replace(s, then=project(then, host), orelse=project(orelse, host))
            return merge(project(then, host), project(orelse, host))
        case Case():
            raise TierError("Only choreographies can be projected")
        case _:
            assert_never(s)


def pending_messages(s: Stmt, host: Endpoint) -> list[tuple[Channel, Value]]:
    """Values sent to `host` by pending communication, oldest first."""
    found: list[tuple[Channel, Value]] = []
    while True:
        match s:
            case MovePending(src=src, value=value, dst=dst, body=body) | SelectPending(
                src=src, value=value, dst=dst, body=body
            ):
                if dst == host:
                    found.append((Channel(src, dst), value))
                s = body
            case Let(body=body) | Move(body=body) | Select(body=body):
                s = body
            case If(then=then):
                # Delayed steps happen in both branches alike.
                s = then
            case _:
                return found


def project_state(s: Stmt, buffer: Buffer, host: Endpoint) -> HostProgram:
    """Project a running choreography process onto a host.

    The host keeps buffered messages addressed to it from outside, followed by values still in flight
    from pending communication.
    """
    kept = buffer.restrict(lambda c: c.receiver == host and c.sender != host)
    in_flight = [(channel, [value]) for channel, value in pending_messages(s, host)]
    return HostProgram(project(s, host), Buffer.of([*kept.queues, *in_flight]))


def partition(s: Stmt, env: HostEnvironment) -> DistributedProgram:
    """Project a choreography onto every declared host."""
    programs = {name: HostProgram(project(s, Endpoint.host(name))) for name in env}
    logger.info("Partitioned choreography onto %d hosts", len(programs))
    return DistributedProgram(programs)


def partition_state(s: Stmt, buffer: Buffer, hosts: list[str]) -> DistributedProgram:
    """Project a running choreography process onto each of its hosts."""
    return DistributedProgram({name: project_state(s, buffer, Endpoint.host(name)) for name in hosts})


def corrupt_config(d: DistributedProgram, env: HostEnvironment, attack: Attack) -> DistributedProgram:
    """Drop the programs of malicious hosts."""
    malicious = env.malicious_hosts(attack)
    return DistributedProgram({h: p for h, p in d.programs.items() if h not in malicious})
