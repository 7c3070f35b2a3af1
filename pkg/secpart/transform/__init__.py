"""Program transformations: source extraction, corruption and endpoint projection."""

from secpart.transform.corruption import Corruptor, corrupt_stmt
from secpart.transform.extraction import source_of
from secpart.transform.projection import (
    DistributedProgram,
    HostProgram,
    corrupt_config,
    merge,
    partition,
    partition_state,
    pending_messages,
    project,
    project_state,
    refines,
)
from secpart.transform.synthesis import SynthesisReport, validate_synthesis

__all__ = [
    "Corruptor",
    "DistributedProgram",
    "HostProgram",
    "SynthesisReport",
    "corrupt_config",
    "corrupt_stmt",
    "merge",
    "partition",
    "partition_state",
    "pending_messages",
    "project",
    "project_state",
    "refines",
    "source_of",
    "validate_synthesis",
]
