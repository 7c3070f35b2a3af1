"""Host environments: the authority label of every host."""

from __future__ import annotations

import logging
import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from secpart.enums import EndpointKind, HostClass
from secpart.errors import HostEnvironmentError, LabelSyntaxError
from secpart.labels.attack import Attack
from secpart.labels.label import ADVERSARY_LABEL, FULLY_TRUSTED, Label

logger = logging.getLogger(__name__)

#: Largest atom universe a host environment may declare.
MAX_ATOMS = 16

_HOST_LINE = re.compile(r"^host\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(<.*>)$")
_RESERVED = frozenset({"adv", "env", "unit", "true", "false", "top", "bot"})


class EndpointLike(Protocol):
    """Anything that names an endpoint by kind and name."""

    @property
    def kind(self) -> EndpointKind:
        """The kind of the endpoint."""
        ...

    @property
    def name(self) -> str:
        """The endpoint name."""
        ...


@dataclass(frozen=True, eq=False)
class HostEnvironment:
    """Maps every host to the label expressing its authority.

    Hosts keep their declaration order, which fixes the order in which environment inputs are delivered.
    """

    #: Host name to label, in declaration order.
    hosts: Mapping[str, Label]

    def __post_init__(self) -> None:
        """Check every host label is uncompromised and the atom universe is small.

        Raises:
            HostEnvironmentError: If a label is compromised, a name is reserved, or too many atoms are used.

        """
        object.__setattr__(self, "hosts", dict(self.hosts))
        for name, label in self.hosts.items():
            if name in _RESERVED:
                raise HostEnvironmentError(f"Host name {name!r} is reserved")
            if not label.uncompromised:
                raise HostEnvironmentError(f"Host {name} has compromised label {label}")
        if len(self.atoms) > MAX_ATOMS:
            raise HostEnvironmentError(f"At most {MAX_ATOMS} atoms are supported, got {len(self.atoms)}")

    @classmethod
    def parse(cls, text: str) -> HostEnvironment:
        """Parse `host alice = <A, A>` lines; `#` starts a comment.

        Raises:
            HostEnvironmentError: If a line is malformed or a host is declared twice.

        """
        hosts: dict[str, Label] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            match = _HOST_LINE.match(line)
            if match is None:
                raise HostEnvironmentError(f"Line {number}: expected `host <name> = <conf, integ>`")
            name, label_text = match.groups()
            if name in hosts:
                raise HostEnvironmentError(f"Line {number}: host {name} declared twice")
            try:
                hosts[name] = Label.parse(label_text)
            except LabelSyntaxError as exc:
                raise HostEnvironmentError(f"Line {number}: {exc}") from exc
        return cls(hosts)

    @classmethod
    def load(cls, path: str | Path) -> HostEnvironment:
        """Read and parse a host file."""
        logger.debug("Loading host environment from %s", path)
        return cls.parse(Path(path).read_text())

    @property
    def atoms(self) -> frozenset[str]:
        """Every atom mentioned by a host label."""
        result: set[str] = set()
        for label in self.hosts.values():
            result |= label.conf.atoms | label.integ.atoms
        return frozenset(result)

    def __iter__(self) -> Iterator[str]:
        """Iterate host names in declaration order."""
        return iter(self.hosts)

    def __contains__(self, name: object) -> bool:
        """Whether a host is declared."""
        return name in self.hosts

    def label(self, name: str) -> Label:
        """Return the label of a declared host.

        Raises:
            HostEnvironmentError: If the host is unknown.

        """
        try:
            return self.hosts[name]
        except KeyError:
            raise HostEnvironmentError(f"Unknown host {name!r}") from None

    def label_of(self, endpoint: EndpointLike) -> Label:
        """Return the label of any endpoint, using the fixed labels of the special endpoints."""
        if endpoint.kind is EndpointKind.HOST:
            return self.label(endpoint.name)
        if endpoint.kind is EndpointKind.ADVERSARY:
            return ADVERSARY_LABEL
        return FULLY_TRUSTED

    def classify(self, name: str, attack: Attack) -> HostClass:
        """Classify a declared host under an attack."""
        return classify_host(name, self, attack)

    def malicious_hosts(self, attack: Attack) -> frozenset[str]:
        """Hosts the attack controls."""
        return frozenset(h for h in self.hosts if self.classify(h, attack) is HostClass.MALICIOUS)

    def is_malicious(self, name: str, attack: Attack) -> bool:
        """Whether a declared host is malicious under the attack."""
        return self.classify(name, attack) is HostClass.MALICIOUS

    def is_honest_endpoint(self, endpoint: EndpointLike, attack: Attack) -> bool:
        """Whether the adversary learns nothing about messages the endpoint sends or receives."""
        if endpoint.kind is EndpointKind.HOST:
            return self.classify(endpoint.name, attack) is HostClass.HONEST
        return endpoint.kind is not EndpointKind.ADVERSARY


def classify_host(name: str, env: HostEnvironment, attack: Attack) -> HostClass:
    """Classify a host as honest, semi-honest or malicious.

    Args:
        name: The host name.
        env: The host environment declaring it.
        attack: The attack to classify under.

    Returns:
        The class of the host.

    Raises:
        HostEnvironmentError: If the host is unknown.

    """
    label = env.label(name)
    if attack.label_is_secret(label):
        return HostClass.HONEST
    if attack.label_is_trusted(label):
        return HostClass.SEMI_HONEST
    return HostClass.MALICIOUS


def channel_label(e1: EndpointLike, e2: EndpointLike, env: HostEnvironment) -> Label:
    """Return the label of the channel between two endpoints.

    The channel label is the pointwise disjunction of the endpoint labels, so anything touching the
    adversary is public.
    """
    return env.label_of(e1).disjoin(env.label_of(e2))
