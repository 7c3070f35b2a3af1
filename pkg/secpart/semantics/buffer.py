"""Per-channel FIFO message buffers."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass

from secpart.lang.values import Channel, Value, value_to_json


@dataclass(frozen=True)
class Buffer:
    """An immutable map from channels to FIFO queues of values.

    Only non-empty queues are stored, sorted by channel, so equal buffers compare and hash equal.
    """

    queues: tuple[tuple[Channel, tuple[Value, ...]], ...] = ()

    @classmethod
    def of(cls, entries: Iterable[tuple[Channel, Iterable[Value]]]) -> Buffer:
        """Build a buffer from channel/queue pairs; queues on the same channel are concatenated."""
        merged: dict[Channel, tuple[Value, ...]] = {}
        for channel, values in entries:
            merged[channel] = merged.get(channel, ()) + tuple(values)
        return cls(tuple(sorted((c, q) for c, q in merged.items() if q)))

    def get(self, channel: Channel) -> tuple[Value, ...]:
        """The queue on a channel, oldest first."""
        for candidate, queue in self.queues:
            if candidate == channel:
                return queue
        return ()

    def push(self, channel: Channel, value: Value) -> Buffer:
        """Append a value to the back of a channel's queue."""
        return Buffer.of([*self.queues, (channel, (value,))])

    def front(self, channel: Channel) -> Value | None:
        """The oldest value on a channel, if any."""
        queue = self.get(channel)
        return queue[0] if queue else None

    def pop(self, channel: Channel) -> tuple[Value, Buffer]:
        """Remove the oldest value on a channel.

        Raises:
            IndexError: If the channel is empty.

        """
        queue = self.get(channel)
        if not queue:
            raise IndexError(f"No message buffered on {channel}")
        rest = [(c, q[1:] if c == channel else q) for c, q in self.queues]
        return queue[0], Buffer.of(rest)

    def channels(self) -> tuple[Channel, ...]:
        """Channels with at least one buffered value."""
        return tuple(c for c, _ in self.queues)

    def restrict(self, keep: Callable[[Channel], bool]) -> Buffer:
        """Keep only the channels satisfying `keep`."""
        return Buffer(tuple((c, q) for c, q in self.queues if keep(c)))

    def __len__(self) -> int:
        """Total number of buffered values."""
        return sum(len(q) for _, q in self.queues)

    def to_dict(self) -> dict[str, list[bool | int | str | None]]:
        """Serialize as `{"a->b": [values...]}`."""
        return {str(c): [value_to_json(v) for v in q] for c, q in self.queues}


EMPTY_BUFFER = Buffer()
