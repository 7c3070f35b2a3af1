"""Enumeration types for secpart."""

from enum import Enum, auto


class HostClass(Enum):
    """How an attack classifies a host."""

    #: Secret and trusted: the adversary neither reads nor controls the host.
    HONEST = auto()

    #: Public and trusted: the adversary reads everything the host sees.
    SEMI_HONEST = auto()

    #: Public and untrusted: the adversary controls the host.
    MALICIOUS = auto()


class EndpointKind(Enum):
    """Represents the kind of a communication endpoint."""

    #: A named protocol host.
    HOST = auto()

    #: The single fully trusted host of source programs.
    IDEAL = auto()

    #: The adversary.
    ADVERSARY = auto()

    #: The external environment.
    ENVIRONMENT = auto()


class Tier(Enum):
    """Syntax tier of an AST node, ordered from most to least restricted."""

    #: Sequential source programs.
    SOURCE = 0

    #: Choreographies with explicit communication.
    CHOREOGRAPHY = 1

    #: Per-host distributed programs.
    DISTRIBUTED = 2

    #: Partially reduced run-time terms.
    RUNTIME = 3


class ProgramKind(Enum):
    """The `kind = ...` header of a program file."""

    #: A source program.
    SOURCE = "source"

    #: A choreography.
    CHOREOGRAPHY = "choreography"

    #: A single host's projected program.
    DISTRIBUTED = "distributed"


class Direction(Enum):
    """Direction of an action."""

    #: A message received.
    INPUT = auto()

    #: A message sent.
    OUTPUT = auto()


class SemanticsMode(Enum):
    """Stepping discipline of a configuration."""

    #: Ideal rules, program order only.
    IDEAL_SEQUENTIAL = auto()

    #: Ideal rules with out-of-order stepping of independent statements.
    IDEAL_CONCURRENT = auto()

    #: Real rules, program order only.
    REAL_SEQUENTIAL = auto()

    #: Real rules with out-of-order stepping of independent statements.
    REAL_CONCURRENT = auto()

    #: Real concurrent rules where communication goes through pending run-time terms.
    ASYNC = auto()

    #: Real concurrent rules with both downgrades flipped, as run by a simulator.
    SIMULATOR_VIEW = auto()

    @property
    def is_ideal(self) -> bool:
        """Whether downgrades and IO follow the ideal rules."""
        return self in (SemanticsMode.IDEAL_SEQUENTIAL, SemanticsMode.IDEAL_CONCURRENT)

    @property
    def is_concurrent(self) -> bool:
        """Whether the concurrent lifting rules apply."""
        return self not in (SemanticsMode.IDEAL_SEQUENTIAL, SemanticsMode.REAL_SEQUENTIAL)


class SyncInit(Enum):
    """Initial synchronization context of the sync checker."""

    #: Every pair of hosts starts synchronized.
    TOP = "top"

    #: Every host starts reset.
    RESET = "reset"


class LowView(Enum):
    """Which labels must agree in a low-equivalence check."""

    #: Agreement on public values.
    PUBLIC = "public"

    #: Agreement on trusted values.
    TRUSTED = "trusted"


class Stage(Enum):
    """A step of the compilation pipeline checked by the simulation harness."""

    #: Source program against the corrupted choreography, both sequential and ideal.
    HOSTS = "hosts"

    #: Sequential against concurrent ideal execution of the corrupted choreography.
    SEQ = "seq"

    #: Ideal against real concurrent execution.
    IDEAL = "ideal"

    #: Real concurrent against asynchronous execution.
    ASYNC = "async"

    #: Asynchronous choreography against its projection.
    PROJ = "proj"

    #: The whole pipeline, source program against the corrupted projection.
    ALL = "all"
