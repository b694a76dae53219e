"""Developer expertise (DOE), Truck Factor, and GenAI attribution-loss simulation from git history."""

__version__ = "0.1.0"

from .expertise import DoeInput, ExpertiseMatrix, compute_doe, compute_matrix  # noqa: E402
from .history import IngestConfig, count_file_loc, ingest_repository, resolve_identity  # noqa: E402
from .ledger import AuthorIdentity, ContributionLedger, PairContribution  # noqa: E402
from .scenario import (  # noqa: E402
    ScenarioConfig,
    ScenarioResult,
    apply_copy_rate,
    run_scenario,
    run_sweep,
    select_affected_files,
)
from .truck_factor import (  # noqa: E402
    ExpertAssignment,
    ExpertThresholds,
    TruckFactorResult,
    compute_truck_factor,
    identify_experts,
)

__all__ = [
    "AuthorIdentity",
    "ContributionLedger",
    "DoeInput",
    "ExpertAssignment",
    "ExpertThresholds",
    "ExpertiseMatrix",
    "IngestConfig",
    "PairContribution",
    "ScenarioConfig",
    "ScenarioResult",
    "TruckFactorResult",
    "apply_copy_rate",
    "compute_doe",
    "compute_matrix",
    "compute_truck_factor",
    "count_file_loc",
    "identify_experts",
    "ingest_repository",
    "resolve_identity",
    "run_scenario",
    "run_sweep",
    "select_affected_files",
]
