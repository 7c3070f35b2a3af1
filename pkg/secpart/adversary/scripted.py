"""Adversaries following a fixed list of turns."""

from __future__ import annotations

import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from secpart import HALT, Accept, Adversary, Decision, Emit, Halt, Observation
from secpart.adversary.redaction import Redactor
from secpart.checking.diagnostics import Report
from secpart.errors import ScriptSyntaxError
from secpart.labels import EMPTY_ATTACK, Attack, HostEnvironment
from secpart.lang.ast import Position
from secpart.lang.values import ADVERSARY, ENVIRONMENT, Channel, Endpoint, Opaque, Value, parse_value
from secpart.semantics.actions import Message

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Pick:
    """Accept the ready channel at an index, counted modulo the number of ready channels."""

    #: Index into the sorted ready channels.
    index: int

    def __str__(self) -> str:
        """Render in script syntax."""
        return f"pick {self.index}"


@dataclass(frozen=True)
class Guarded:
    """Take a turn only if the last payload observed on a channel equals a value."""

    #: The observed channel.
    channel: Channel

    #: The payload to compare with.
    value: Value

    #: The turn to take when the guard holds.
    turn: Accept | Emit | Pick | Halt

    def __str__(self) -> str:
        """Render in script syntax."""
        return f"when {self.channel} == {self.value}: {self.turn}"


#: One line of a script.
Turn = Accept | Emit | Pick | Halt | Guarded


class Fallback(Enum):
    """What a script does once its turns run out."""

    #: Behave like the dummy adversary.
    DUMMY = "dummy"

    #: Stop scheduling.
    HALT = "halt"


_ACCEPT = re.compile(r"^accept\s+(\S+)$")
_PICK = re.compile(r"^pick\s+(\d+)$")
_EMIT = re.compile(r"^emit\s+(\S+)\s+(\S+)$")
_WHEN = re.compile(r"^when\s+(\S+)\s*==\s*(\S+)\s*:\s*(.+)$")


@dataclass(frozen=True)
class Script:
    """A list of turns and what to do after the last one."""

    #: The turns, in order.
    turns: tuple[Turn, ...] = ()

    #: Behavior once the turns run out.
    fallback: Fallback = Fallback.DUMMY

    #: Source line of every turn, for diagnostics.
    lines: tuple[int, ...] = field(default=(), compare=False)

    @classmethod
    def parse(cls, text: str) -> Script:
        """Parse a script; one turn per line, `#` starts a comment.

        A final `dummy` or `halt` line without anything after it sets the fallback.

        Raises:
            ScriptSyntaxError: If a line is malformed.

        """
        entries: list[tuple[int, str]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                entries.append((number, line))
        fallback = Fallback.DUMMY
        if entries and entries[-1][1] in ("dummy", "halt"):
            fallback = Fallback(entries.pop()[1])
        turns = tuple(_parse_turn(line, number) for number, line in entries)
        return cls(turns, fallback, tuple(number for number, _ in entries))

    @classmethod
    def load(cls, path: str | Path) -> Script:
        """Read and parse a script file."""
        logger.debug("Loading adversary script from %s", path)
        return cls.parse(Path(path).read_text())

    def position(self, index: int) -> Position | None:
        """Where a turn was written, if known."""
        return Position(self.lines[index], 1) if index < len(self.lines) else None

    def __str__(self) -> str:
        """Render in script syntax."""
        return "\n".join([*(str(turn) for turn in self.turns), self.fallback.value])


def _parse_channel(text: str, number: int) -> Channel:
    try:
        return Channel.parse(text)
    except ValueError as exc:
        raise ScriptSyntaxError(f"Line {number}: {exc}") from exc


def _parse_value(text: str, number: int) -> Value:
    try:
        return parse_value(text)
    except ValueError as exc:
        raise ScriptSyntaxError(f"Line {number}: {exc}") from exc


def _parse_turn(line: str, number: int) -> Turn:
    if line == "halt":
        return HALT
    if match := _ACCEPT.match(line):
        return Accept(_parse_channel(match.group(1), number))
    if match := _PICK.match(line):
        return Pick(int(match.group(1)))
    if match := _EMIT.match(line):
        channel = _parse_channel(match.group(1), number)
        return Emit(Message(channel.sender, channel.receiver, _parse_value(match.group(2), number)))
    if match := _WHEN.match(line):
        inner = _parse_turn(match.group(3).strip(), number)
        if isinstance(inner, Guarded):
            raise ScriptSyntaxError(f"Line {number}: guards do not nest")
        return Guarded(_parse_channel(match.group(1), number), _parse_value(match.group(2), number), inner)
    raise ScriptSyntaxError(f"Line {number}: expected accept, pick, emit, when, halt or dummy, got {line!r}")


def parse_script(text: str) -> Script:
    """Parse an adversary script."""
    return Script.parse(text)


class ScriptedAdversary(Adversary):
    """Plays a script's turns in order, one decision per turn.

    An `accept` naming a channel that is not ready, a `pick` with nothing ready and a guard that does not
    hold are skipped, and the next turn is tried within the same decision.

    Args:
        script: The turns to play.

    """

    def __init__(self, script: Script) -> None:
        """Initialize at the first turn."""
        self.script = script
        self.history: list[Observation] = []
        self._next = 0
        self._last: dict[Channel, Value | None] = {}

    def decide(self, ready: Sequence[Channel]) -> Decision:
        """Play turns until one yields a decision, then fall back."""
        while self._next < len(self.script.turns):
            turn = self.script.turns[self._next]
            self._next += 1
            decision = self._resolve(turn, ready)
            if decision is not None:
                return decision
        if self.script.fallback is Fallback.HALT or not ready:
            return HALT
        return Accept(ready[0])

    def _resolve(self, turn: Turn, ready: Sequence[Channel]) -> Decision | None:
        match turn:
            case Accept(channel=channel):
                if channel in ready:
                    return turn
                logger.warning("Script turn %s skipped: channel not ready", turn)
                return None
            case Pick(index=index):
                return Accept(ready[index % len(ready)]) if ready else None
            case Emit() | Halt():
                return turn
            case Guarded(channel=channel, value=value, turn=inner):
                return self._resolve(inner, ready) if self._last.get(channel) == value else None
        return None

    def observe(self, observation: Observation) -> None:
        """Remember the last payload seen on every channel."""
        self.history.append(observation)
        self._last[observation.channel] = observation.value


# ===== Interface checks =====


def forgeable(sender: Endpoint, env: HostEnvironment, attack: Attack) -> bool:
    """Whether the adversary may send messages as `sender`."""
    return sender == ADVERSARY or (sender.is_host and sender.name in env and env.is_malicious(sender.name, attack))


def emission_problem(message: Message, env: HostEnvironment, attack: Attack) -> str | None:
    """Why an emission breaks the adversary interface, or `None` if it does not."""
    if not forgeable(message.sender, env, attack):
        return f"{message.sender} is neither the adversary nor a malicious host"
    if message.receiver in (ENVIRONMENT, ADVERSARY):
        return f"messages to {message.receiver} cannot be forged"
    if isinstance(message.value, Opaque):
        return "placeholders cannot be sent"
    return None


def validate_script(script: Script, env: HostEnvironment, attack: Attack = EMPTY_ATTACK) -> Report:
    """Check every turn of a script against the adversary interface.

    Emissions must come from the adversary or a malicious host, and guards may only read channels with a
    dishonest end, whose payloads are not redacted.
    """
    redactor = Redactor(env, attack)
    report = Report()
    for index, turn in enumerate(script.turns):
        where = script.position(index)
        if isinstance(turn, Guarded):
            if redactor.hides(turn.channel):
                report.add("Adv-Redacted", f"Guard reads {turn.channel}, whose payloads are hidden", where)
            turn = turn.turn
        if isinstance(turn, Emit):
            problem = emission_problem(turn.message, env, attack)
            if problem is not None:
                report.add("Adv-Forge", f"Cannot emit {turn.message}: {problem}", where)
    if not report.ok:
        logger.info("Adversary script breaks the interface: %s", report.diagnostics[0])
    return report
