"""Adversaries, the interface they share, simulators and syntactic low-equivalence."""

from secpart import HALT, Accept, Adversary, Decision, Emit, Halt, Observation, Simulator
from secpart.adversary.dummy import DummyAdversary
from secpart.adversary.family import EmissionSite, adversary_family, emission_sites, family_size
from secpart.adversary.low_equivalence import AntiUnifier, hole_label, low_equivalent
from secpart.adversary.monitor import InterfaceMonitor
from secpart.adversary.redaction import Redactor
from secpart.adversary.scripted import (
    Fallback,
    Guarded,
    Pick,
    Script,
    ScriptedAdversary,
    Turn,
    emission_problem,
    forgeable,
    parse_script,
    validate_script,
)
from secpart.adversary.simulators import (
    RECEIVE_RULES,
    AsyncSimulator,
    CorruptionSimulator,
    HostSelectionSimulator,
    IdealExecutionSimulator,
    ProjectionSimulator,
    SequentializationSimulator,
    ViewSimulator,
    chain_divergence,
    leak_hosts,
)

__all__ = [
    "HALT",
    "RECEIVE_RULES",
    "Accept",
    "Adversary",
    "AntiUnifier",
    "AsyncSimulator",
    "CorruptionSimulator",
    "Decision",
    "DummyAdversary",
    "Emit",
    "EmissionSite",
    "Fallback",
    "Guarded",
    "Halt",
    "HostSelectionSimulator",
    "IdealExecutionSimulator",
    "InterfaceMonitor",
    "Observation",
    "Pick",
    "ProjectionSimulator",
    "Redactor",
    "Script",
    "ScriptedAdversary",
    "SequentializationSimulator",
    "Simulator",
    "Turn",
    "ViewSimulator",
    "adversary_family",
    "chain_divergence",
    "emission_problem",
    "emission_sites",
    "family_size",
    "forgeable",
    "hole_label",
    "leak_hosts",
    "low_equivalent",
    "parse_script",
    "validate_script",
]
