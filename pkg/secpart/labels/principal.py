"""Principals: elements of the free distributive lattice over atomic principal names."""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable
from dataclasses import dataclass

from secpart.errors import LabelSyntaxError

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<sym>[&|()]))")


def _minimize(clauses: Iterable[frozenset[str]]) -> frozenset[frozenset[str]]:
    """Drop every clause that is a superset of another one."""
    unique = set(clauses)
    return frozenset(c for c in unique if not any(other < c for other in unique))


@dataclass(frozen=True)
class Principal:
    """A monotone boolean formula in irredundant disjunctive normal form.

    Each clause is a conjunction of atoms and the principal is the disjunction of its clauses.
    The strongest principal is the empty disjunction (false) and the weakest one is the disjunction
    holding only the empty conjunction (true). Acts-for coincides with logical implication.

    Use `Principal.of`, `Principal.atom` or the operators `&` and `|` to build principals so that the
    clause set is always canonical.
    """

    #: Antichain of atom sets.
    clauses: frozenset[frozenset[str]]

    @classmethod
    def of(cls, clauses: Iterable[Iterable[str]]) -> Principal:
        """Build a canonical principal from arbitrary clauses.

        Args:
            clauses: Conjunctions (as atom collections) to be joined by disjunction.

        Returns:
            The canonical principal.

        """
        return cls(_minimize(frozenset(c) for c in clauses))

    @classmethod
    def atom(cls, name: str) -> Principal:
        """Return the principal consisting of a single atom."""
        return cls(frozenset({frozenset({name})}))

    @classmethod
    def parse(cls, text: str) -> Principal:
        """Parse `A & (B | C)`, `top` or `bot`.

        `&` binds tighter than `|`.

        Raises:
            LabelSyntaxError: If the text is not a principal.

        """
        return _PrincipalParser(text).parse()

    @property
    def atoms(self) -> frozenset[str]:
        """All atoms mentioned by the principal."""
        return frozenset(itertools.chain.from_iterable(self.clauses))

    def acts_for(self, other: Principal) -> bool:
        """Whether this principal implies `other`.

        Every clause of `self` must contain some clause of `other`.
        """
        return all(any(theirs <= mine for theirs in other.clauses) for mine in self.clauses)

    def evaluate(self, true_atoms: Iterable[str]) -> bool:
        """Evaluate the formula under the assignment making exactly `true_atoms` true."""
        assignment = frozenset(true_atoms)
        return any(clause <= assignment for clause in self.clauses)

    def __and__(self, other: Principal) -> Principal:
        """Conjunction: the weakest principal acting for both."""
        return Principal(_minimize(a | b for a in self.clauses for b in other.clauses))

    def __or__(self, other: Principal) -> Principal:
        """Disjunction: the strongest principal both act for."""
        return Principal(_minimize(self.clauses | other.clauses))

    def __str__(self) -> str:
        """Render in the concrete principal syntax."""
        if not self.clauses:
            return "top"
        if self.clauses == WEAKEST.clauses:
            return "bot"
        parts = []
        for clause in sorted(self.clauses, key=lambda c: (len(c), sorted(c))):
            text = " & ".join(sorted(clause))
            parts.append(f"({text})" if len(clause) > 1 and len(self.clauses) > 1 else text)
        return " | ".join(parts)


#: The principal every principal is implied by (false).
STRONGEST = Principal(frozenset())

#: The principal implied by every principal (true).
WEAKEST = Principal(frozenset({frozenset()}))


def implies_by_truth_table(p: Principal, q: Principal, atoms: Iterable[str] | None = None) -> bool:
    """Decide `p ⪰ q` by enumerating every assignment of the atoms.

    Slow reference used to cross-check the structural decision procedure.

    Args:
        p: Candidate stronger principal.
        q: Candidate weaker principal.
        atoms: Atom universe; defaults to the atoms of `p` and `q`.

    Returns:
        True iff every assignment making `p` true also makes `q` true.

    """
    universe = sorted(set(atoms) if atoms is not None else p.atoms | q.atoms)
    for size in range(len(universe) + 1):
        for true_atoms in itertools.combinations(universe, size):
            if p.evaluate(true_atoms) and not q.evaluate(true_atoms):
                return False
    return True


class _PrincipalParser:
    def __init__(self, text: str) -> None:
        self._text = text
        self._tokens = self._tokenize(text)
        self._pos = 0

    def _tokenize(self, text: str) -> list[str]:
        tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN.match(text, pos)
            if match is None:
                raise LabelSyntaxError(f"Unexpected character {text[pos:].strip()[0]!r} in principal {text!r}")
            tokens.append(match.group("ident") or match.group("sym"))
            pos = match.end()
        return tokens

    def parse(self) -> Principal:
        if not self._tokens:
            raise LabelSyntaxError("Empty principal")
        result = self._disjunction()
        if self._pos != len(self._tokens):
            raise LabelSyntaxError(f"Trailing input {self._tokens[self._pos]!r} in principal {self._text!r}")
        return result

    def _peek(self) -> str | None:
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def _disjunction(self) -> Principal:
        result = self._conjunction()
        while self._peek() == "|":
            self._pos += 1
            result = result | self._conjunction()
        return result

    def _conjunction(self) -> Principal:
        result = self._primary()
        while self._peek() == "&":
            self._pos += 1
            result = result & self._primary()
        return result

    def _primary(self) -> Principal:
        token = self._peek()
        if token is None:
            raise LabelSyntaxError(f"Unexpected end of principal {self._text!r}")
        self._pos += 1
        if token == "(":
            inner = self._disjunction()
            if self._peek() != ")":
                raise LabelSyntaxError(f"Missing ')' in principal {self._text!r}")
            self._pos += 1
            return inner
        if token == "top":
            return STRONGEST
        if token == "bot":
            return WEAKEST
        if token in ("&", "|", ")"):
            raise LabelSyntaxError(f"Unexpected {token!r} in principal {self._text!r}")
        return Principal.atom(token)
