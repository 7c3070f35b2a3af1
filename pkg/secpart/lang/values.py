"""Values, endpoints, channels and variables."""

from __future__ import annotations

from dataclasses import dataclass

from secpart.enums import EndpointKind

#: Bounds of the 64-bit signed integers programs compute with.
INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


@dataclass(frozen=True)
class UnitValue:
    """The unit value."""

    def __str__(self) -> str:
        """Render as `unit`."""
        return "unit"


@dataclass(frozen=True)
class BoolValue:
    """A boolean value."""

    #: The boolean.
    value: bool

    def __str__(self) -> str:
        """Render as `true` or `false`."""
        return "true" if self.value else "false"


@dataclass(frozen=True)
class IntValue:
    """A 64-bit signed integer value."""

    #: The integer, kept within the 64-bit range.
    value: int

    def __post_init__(self) -> None:
        """Wrap the integer into the 64-bit range."""
        object.__setattr__(self, "value", wrap_int(self.value))

    def __str__(self) -> str:
        """Render as a decimal literal."""
        return str(self.value)


@dataclass(frozen=True)
class Opaque:
    """Stands for a value its holder is not allowed to see."""

    #: Where the hidden value came from, for diagnostics.
    origin: str = "?"

    def __str__(self) -> str:
        """Render as `?origin`; not parseable."""
        return f"?{self.origin}"


Value = UnitValue | BoolValue | IntValue | Opaque

UNIT = UnitValue()
TRUE = BoolValue(True)
FALSE = BoolValue(False)


def wrap_int(value: int) -> int:
    """Wrap an integer into the 64-bit signed range."""
    return (value - INT_MIN) % 2**64 + INT_MIN


#: The default finite value domain for adversary and environment inputs.
DEFAULT_DOMAIN: tuple[Value, ...] = (UNIT, TRUE, FALSE, IntValue(0), IntValue(1), IntValue(2))


def parse_value(text: str) -> Value:
    """Parse `unit`, `true`, `false` or an integer literal.

    Raises:
        ValueError: If the text is not a value literal.

    """
    stripped = text.strip()
    if stripped == "unit":
        return UNIT
    if stripped == "true":
        return TRUE
    if stripped == "false":
        return FALSE
    try:
        return IntValue(int(stripped))
    except ValueError:
        raise ValueError(f"Not a value literal: {text!r}") from None


def parse_domain(text: str) -> tuple[Value, ...]:
    """Parse a comma-separated list of value literals such as `unit,true,0,1`."""
    return tuple(parse_value(item) for item in text.split(",") if item.strip())


def value_sort_key(value: Value) -> tuple[int, int, str]:
    """Order values as unit, booleans, integers, then placeholders."""
    if isinstance(value, UnitValue):
        return (0, 0, "")
    if isinstance(value, BoolValue):
        return (1, int(value.value), "")
    if isinstance(value, IntValue):
        return (2, value.value, "")
    return (3, 0, value.origin)


def value_to_json(value: Value) -> bool | int | str | None:
    """Encode a value as JSON: unit is null, placeholders are strings."""
    if isinstance(value, UnitValue):
        return None
    if isinstance(value, (BoolValue, IntValue)):
        return value.value
    return str(value)


def value_from_json(data: bool | int | str | None) -> Value:
    """Decode a value written by `value_to_json`."""
    if data is None:
        return UNIT
    if isinstance(data, bool):
        return BoolValue(data)
    if isinstance(data, int):
        return IntValue(data)
    return Opaque(data.lstrip("?"))


@dataclass(frozen=True, order=True)
class Endpoint:
    """A communication endpoint: a host, the ideal host, the adversary or the environment."""

    #: The endpoint name; `*`, `adv` and `env` for the special endpoints.
    name: str

    #: The kind of endpoint.
    kind: EndpointKind = EndpointKind.HOST

    @classmethod
    def host(cls, name: str) -> Endpoint:
        """Return the endpoint of a named host, or the ideal host for `*`."""
        return IDEAL if name == "*" else cls(name, EndpointKind.HOST)

    @property
    def is_host(self) -> bool:
        """Whether the endpoint is a named host."""
        return self.kind is EndpointKind.HOST

    def __str__(self) -> str:
        """Render as the endpoint name."""
        return self.name


IDEAL = Endpoint("*", EndpointKind.IDEAL)
ADVERSARY = Endpoint("adv", EndpointKind.ADVERSARY)
ENVIRONMENT = Endpoint("env", EndpointKind.ENVIRONMENT)


@dataclass(frozen=True, order=True)
class Channel:
    """An ordered pair of endpoints messages travel on."""

    #: The sending endpoint.
    sender: Endpoint

    #: The receiving endpoint.
    receiver: Endpoint

    @property
    def is_internal(self) -> bool:
        """Whether the channel is a self-loop used for internal steps."""
        return self.sender == self.receiver

    @property
    def touches_environment(self) -> bool:
        """Whether either end is the environment."""
        return ENVIRONMENT in (self.sender, self.receiver)

    @classmethod
    def parse(cls, text: str) -> Channel:
        """Parse `alice->bob`, `adv->alice` or `alice->env`."""
        sender, sep, receiver = text.partition("->")
        if not sep or not sender.strip() or not receiver.strip():
            raise ValueError(f"Not a channel: {text!r}")
        return cls(endpoint_from_name(sender.strip()), endpoint_from_name(receiver.strip()))

    def __str__(self) -> str:
        """Render as `sender->receiver`."""
        return f"{self.sender}->{self.receiver}"


def endpoint_from_name(name: str) -> Endpoint:
    """Map a name to its endpoint, recognizing `*`, `adv` and `env`."""
    if name == ADVERSARY.name:
        return ADVERSARY
    if name == ENVIRONMENT.name:
        return ENVIRONMENT
    return Endpoint.host(name)


@dataclass(frozen=True)
class Var:
    """A variable occurrence."""

    #: The variable name.
    name: str

    def __str__(self) -> str:
        """Render as the variable name."""
        return self.name


Atomic = UnitValue | BoolValue | IntValue | Opaque | Var

#: The wildcard binder; never referenced.
WILDCARD = "_"
