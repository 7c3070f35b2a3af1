"""Utility functions for secpart."""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from secpart.lang.values import Endpoint


def fresh_name(base: str, used: set[str]) -> str:
    """Return a name derived from `base` that is not in `used`, and reserve it.

    Trailing digits and underscores of `base` are dropped before numbering, so `x`, `x_1` and `x2` all
    draw from `x_1`, `x_2`, ...
    """
    stem = base.rstrip("0123456789").rstrip("_") or base
    for index in itertools.count(1):
        candidate = f"{stem}_{index}"
        if candidate not in used:
            used.add(candidate)
            return candidate
    raise AssertionError("unreachable")


def host_names(endpoints: Iterable[Endpoint]) -> list[str]:
    """Names of endpoints in canonical (sorted) order."""
    return sorted(endpoint.name for endpoint in endpoints)
