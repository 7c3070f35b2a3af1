"""Finite families of scripted adversaries, enumerated up to a decision depth."""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Iterator, Sequence

from typing_extensions import assert_never

from secpart import Emit
from secpart.adversary.scripted import Pick, Script, Turn, forgeable
from secpart.lang.ast import Case, Endorse, If, Let, Move, MovePending, Receive, Select, SelectPending, Skip, Stmt
from secpart.lang.values import ADVERSARY, Channel, Value
from secpart.semantics.actions import Message
from secpart.semantics.configuration import Configuration
from secpart.semantics.rules import Semantics

logger = logging.getLogger(__name__)

#: A channel the adversary may write to, with the values worth writing and how many messages it takes.
EmissionSite = tuple[Channel, tuple[Value, ...], int]


def _sites(sem: Semantics, s: Stmt) -> Counter[tuple[Channel, tuple[Value, ...]]]:
    match s:
        case Skip():
            return Counter()
        case Let(host=host, expr=expr, body=body):
            found: Counter[tuple[Channel, tuple[Value, ...]]] = Counter()
            if isinstance(expr, Receive) and not sem.ideal and forgeable(expr.peer, sem.env, sem.attack):
                found[(Channel(expr.peer, host), sem.domain)] += 1
            if isinstance(expr, Endorse) and sem.ideal and sem.taints(expr):
                found[(Channel(ADVERSARY, host), sem.domain)] += 1
            return found + _sites(sem, body)
        case Move(body=body) | Select(body=body) | MovePending(body=body) | SelectPending(body=body):
            return _sites(sem, body)
        case If(then=then, orelse=orelse):
            return _sites(sem, then) | _sites(sem, orelse)
        case Case(src=src, dst=dst, branches=branches):
            result: Counter[tuple[Channel, tuple[Value, ...]]] = Counter()
            for _, branch in branches:
                result |= _sites(sem, branch)
            if forgeable(src, sem.env, sem.attack):
                result[(Channel(src, dst), tuple(value for value, _ in branches))] += 1
            return result
        case _:
            assert_never(s)


def emission_sites(config: Configuration) -> list[EmissionSite]:
    """Channels into the configuration the adversary may write to, sorted by channel.

    Real configurations read forged messages where an honest or semi-honest host receives from a malicious
    one, `case` included. Ideal configurations read them where an endorsement taints.
    """
    merged: Counter[tuple[Channel, tuple[Value, ...]]] = Counter()
    for process in config.processes:
        merged |= _sites(config.semantics, process.stmt)
    return sorted(((channel, values, count) for (channel, values), count in merged.items()), key=lambda s: s[0])


def _emission_plans(sites: Sequence[EmissionSite]) -> Iterator[tuple[Emit, ...]]:
    """Every way of writing zero or more messages to each site, up front."""
    per_site: list[list[tuple[Emit, ...]]] = []
    for channel, values, count in sites:
        choices: list[tuple[Emit, ...]] = [()]
        for length in range(1, count + 1):
            for picked in itertools.product(values, repeat=length):
                choices.append(tuple(Emit(Message(channel.sender, channel.receiver, v)) for v in picked))
        per_site.append(choices)
    for combination in itertools.product(*per_site):
        yield tuple(itertools.chain.from_iterable(combination))


def _pick_sequences(depth: int, branching: int) -> Iterator[tuple[Pick, ...]]:
    """Pick sequences up to `depth`, without trailing `pick 0` turns, which the dummy fallback repeats."""
    seen: set[tuple[int, ...]] = set()
    for indices in itertools.product(range(branching), repeat=depth):
        trimmed = list(indices)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        key = tuple(trimmed)
        if key not in seen:
            seen.add(key)
            yield tuple(Pick(index) for index in key)


def adversary_family(
    sites: Sequence[EmissionSite] = (),
    depth: int = 6,
    branching: int = 2,
) -> Iterator[Script]:
    """Enumerate scripts: every emission plan followed by every pick sequence, then the dummy fallback.

    The first script is the dummy adversary itself.

    Args:
        sites: Where the adversary may write, usually from `emission_sites`.
        depth: Number of scheduling decisions the scripts vary.
        branching: Number of ready channels considered at each decision.

    Raises:
        ValueError: If depth is negative or branching is not positive.

    """
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    if branching < 1:
        raise ValueError(f"branching must be positive, got {branching}")
    count = 0
    for plan in _emission_plans(sites):
        for picks in _pick_sequences(depth, branching):
            turns: tuple[Turn, ...] = (*plan, *picks)
            count += 1
            yield Script(turns)
    logger.debug("Enumerated %d adversary scripts", count)


def family_size(sites: Sequence[EmissionSite] = (), depth: int = 6, branching: int = 2) -> int:
    """Number of scripts `adversary_family` yields."""
    plans = 1
    for _, values, count in sites:
        plans *= sum(len(values) ** length for length in range(count + 1))
    picks = 1 + sum((branching - 1) * branching ** (length - 1) for length in range(1, depth + 1))
    return plans * picks
