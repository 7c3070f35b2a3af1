"""Attacks: which atomic principals the adversary can read and control."""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from secpart.errors import InvalidAttackError
from secpart.labels.label import Label
from secpart.labels.principal import Principal

_ENTRY = re.compile(r"^\s*(public|untrusted)\s*=\s*\[(.*)\]\s*$")


@dataclass(frozen=True)
class Attack:
    """The public and untrusted atom sets of a static adversary.

    A principal is public when it evaluates to true with exactly the public atoms set, and
    untrusted likewise with the untrusted atoms. Every untrusted atom must also be public.
    """

    #: Atoms whose secrets the adversary learns.
    public_atoms: frozenset[str] = field(default_factory=frozenset)

    #: Atoms the adversary controls.
    untrusted_atoms: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        """Normalize the atom sets and check validity.

        Raises:
            InvalidAttackError: If an untrusted atom is not public.

        """
        object.__setattr__(self, "public_atoms", frozenset(self.public_atoms))
        object.__setattr__(self, "untrusted_atoms", frozenset(self.untrusted_atoms))
        stray = self.untrusted_atoms - self.public_atoms
        if stray:
            raise InvalidAttackError(f"Untrusted atoms must be public, got untrusted but secret {sorted(stray)}")

    @classmethod
    def parse(cls, text: str) -> Attack:
        """Parse `public = [A, B]` and `untrusted = [A]` lines.

        Missing lines default to the empty set; `#` starts a comment.

        Raises:
            InvalidAttackError: If a line is malformed or the attack is invalid.

        """
        sets: dict[str, frozenset[str]] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            match = _ENTRY.match(line)
            if match is None:
                raise InvalidAttackError(f"Line {number}: expected `public = [...]` or `untrusted = [...]`")
            key, body = match.groups()
            if key in sets:
                raise InvalidAttackError(f"Line {number}: `{key}` given twice")
            sets[key] = frozenset(atom.strip() for atom in body.split(",") if atom.strip())
        return cls(sets.get("public", frozenset()), sets.get("untrusted", frozenset()))

    def check_atoms(self, universe: Iterable[str]) -> None:
        """Reject atoms outside the declared universe.

        Raises:
            InvalidAttackError: If an atom is unknown.

        """
        unknown = (self.public_atoms | self.untrusted_atoms) - frozenset(universe)
        if unknown:
            raise InvalidAttackError(f"Attack names unknown atoms {sorted(unknown)}")

    def is_public(self, p: Principal) -> bool:
        """Whether the adversary learns what `p` protects."""
        return p.evaluate(self.public_atoms)

    def is_untrusted(self, p: Principal) -> bool:
        """Whether the adversary can act for `p`."""
        return p.evaluate(self.untrusted_atoms)

    def label_is_public(self, label: Label) -> bool:
        """Whether data at `label` is visible to the adversary."""
        return self.is_public(label.conf)

    def label_is_secret(self, label: Label) -> bool:
        """Whether data at `label` is hidden from the adversary."""
        return not self.is_public(label.conf)

    def label_is_untrusted(self, label: Label) -> bool:
        """Whether the adversary can influence data at `label`."""
        return self.is_untrusted(label.integ)

    def label_is_trusted(self, label: Label) -> bool:
        """Whether data at `label` is beyond the adversary's influence."""
        return not self.is_untrusted(label.integ)

    def __str__(self) -> str:
        """Render in the attack file syntax on one line."""
        return f"public=[{', '.join(sorted(self.public_atoms))}] untrusted=[{', '.join(sorted(self.untrusted_atoms))}]"


def is_public(p: Principal, attack: Attack) -> bool:
    """Return whether `p` is public under `attack`."""
    return attack.is_public(p)


def is_untrusted(p: Principal, attack: Attack) -> bool:
    """Return whether `p` is untrusted under `attack`."""
    return attack.is_untrusted(p)


#: The attack with no public and no untrusted atoms.
EMPTY_ATTACK = Attack()


def attack_candidates(atoms: Iterable[str]) -> Iterator[tuple[frozenset[str], frozenset[str]]]:
    """Yield every (public, untrusted) pair of atom subsets, valid or not."""
    universe = sorted(set(atoms))
    subsets = [
        frozenset(combo) for size in range(len(universe) + 1) for combo in itertools.combinations(universe, size)
    ]
    yield from itertools.product(subsets, subsets)


def enumerate_attacks(atoms: Iterable[str]) -> Iterator[Attack]:
    """Yield every valid attack over `atoms`, smallest public set first."""
    for public, untrusted in attack_candidates(atoms):
        if untrusted <= public:
            yield Attack(public, untrusted)
