"""Security-label algebra: principals, labels, attacks and host classification."""

from secpart.labels.attack import (
    EMPTY_ATTACK,
    Attack,
    attack_candidates,
    enumerate_attacks,
    is_public,
    is_untrusted,
)
from secpart.labels.host_environment import MAX_ATOMS, HostEnvironment, channel_label, classify_host
from secpart.labels.label import (
    ADVERSARY_LABEL,
    FULLY_TRUSTED,
    PUBLIC_TRUSTED,
    SECRET_UNTRUSTED,
    Label,
    label_flows_to,
    label_join,
    label_meet,
    uncompromised,
)
from secpart.labels.principal import STRONGEST, WEAKEST, Principal, implies_by_truth_table


def acts_for(p: Principal, q: Principal) -> bool:
    """Return whether `p` acts for (logically implies) `q`."""
    return p.acts_for(q)


__all__ = [
    "ADVERSARY_LABEL",
    "EMPTY_ATTACK",
    "FULLY_TRUSTED",
    "MAX_ATOMS",
    "PUBLIC_TRUSTED",
    "SECRET_UNTRUSTED",
    "STRONGEST",
    "WEAKEST",
    "Attack",
    "HostEnvironment",
    "Label",
    "Principal",
    "acts_for",
    "attack_candidates",
    "channel_label",
    "classify_host",
    "enumerate_attacks",
    "implies_by_truth_table",
    "is_public",
    "is_untrusted",
    "label_flows_to",
    "label_join",
    "label_meet",
    "uncompromised",
]
