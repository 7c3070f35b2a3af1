"""Runs, environment traces, simulation and preservation checks, reports and the command line."""

from secpart.harness.config import HarnessSettings
from secpart.harness.reports import all_passed, summarize, verdict_frame, write_report
from secpart.harness.runner import (
    DEFAULT_ENV_DOMAIN,
    AdversaryFactory,
    RunResult,
    choreography_config,
    config_input_sites,
    default_depth,
    distributed_config,
    env_input_assignments,
    make_semantics,
    nonmalicious_hosts,
    run,
    source_config,
    trace_set,
)
from secpart.harness.simulation import (
    Counterexample,
    Verdict,
    check_bisimulation,
    check_functional,
    check_rhp,
    check_simulation,
    check_stage,
    check_view_equivalence,
    rhp_suite,
    simulation_suite,
    stage_family,
)
from secpart.harness.stages import Pipeline, SimulatorBuilder, StagePlan, build_stage
from secpart.semantics import env_restrict

__all__ = [
    "DEFAULT_ENV_DOMAIN",
    "AdversaryFactory",
    "Counterexample",
    "HarnessSettings",
    "Pipeline",
    "RunResult",
    "SimulatorBuilder",
    "StagePlan",
    "Verdict",
    "all_passed",
    "build_stage",
    "check_bisimulation",
    "check_functional",
    "check_rhp",
    "check_simulation",
    "check_stage",
    "check_view_equivalence",
    "choreography_config",
    "config_input_sites",
    "default_depth",
    "distributed_config",
    "env_input_assignments",
    "env_restrict",
    "make_semantics",
    "nonmalicious_hosts",
    "rhp_suite",
    "run",
    "simulation_suite",
    "source_config",
    "stage_family",
    "summarize",
    "trace_set",
    "verdict_frame",
    "write_report",
]
