"""GenAI attribution-loss simulation.

For each developer a random share of the files they touched is marked as
"affected"; on those files every commit's added lines lose a uniform copy
rate. DOE and the Truck Factor are then recomputed and compared with the
untouched baseline.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Mapping, Sequence

from .errors import DegenerateRanking, UnknownPair
from .expertise import ExpertiseMatrix, compute_matrix
from .ledger import ContributionLedger, Pair, PairContribution
from .stats import kendall_tau
from .truck_factor import (
    DEFAULT_COVERAGE,
    ExpertThresholds,
    TruckFactorResult,
    compute_truck_factor,
    identify_experts,
)

DEFAULT_COPY_RATE = 0.39
DEFAULT_FRACTIONS: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5)
SEED_MASK = (1 << 64) - 1

# Mean copy percentage per language (file-link pairs), keyed by extension.
LANGUAGE_COPY_RATES: dict[str, float] = {
    ".c": 0.59, ".h": 0.59,
    ".cs": 0.51,
    ".sh": 0.44, ".bash": 0.44, ".zsh": 0.44,
    ".java": 0.42,
    ".py": 0.41,
    ".cpp": 0.38, ".cc": 0.38, ".cxx": 0.38, ".c++": 0.38, ".hpp": 0.38, ".hh": 0.38, ".hxx": 0.38,
    ".js": 0.34, ".jsx": 0.34, ".mjs": 0.34, ".cjs": 0.34,
    ".ts": 0.33, ".tsx": 0.33,
    ".php": 0.32,
}


@dataclass(frozen=True)
class ScenarioConfig:
    impact_fraction: float
    copy_rate: float = DEFAULT_COPY_RATE
    rng_seed: int = 0
    thresholds: ExpertThresholds = field(default_factory=ExpertThresholds)
    coverage: float = DEFAULT_COVERAGE
    floor_days: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.impact_fraction <= 1:
            raise ValueError(f"impact_fraction must be in [0, 1], got {self.impact_fraction}")
        if not 0 <= self.copy_rate <= 1:
            raise ValueError(f"copy_rate must be in [0, 1], got {self.copy_rate}")
        if not 0 <= self.rng_seed <= SEED_MASK:
            raise ValueError("rng_seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict[str, Any]:
        return {
            "impact_fraction": self.impact_fraction,
            "copy_rate": self.copy_rate,
            "rng_seed": self.rng_seed,
            "thresholds": self.thresholds.to_dict(),
            "coverage": self.coverage,
            "floor_days": self.floor_days,
        }


@dataclass(frozen=True)
class ScenarioResult:
    config: ScenarioConfig
    baseline_tf: TruckFactorResult
    impacted_tf: TruckFactorResult
    doe_deltas: Mapping[Pair, float]
    # None when both removal orders are unrankable and differ.
    kendall_tau: float | None
    affected_files: Mapping[str, frozenset[str]]
    baseline_matrix: ExpertiseMatrix
    impacted_matrix: ExpertiseMatrix

    @property
    def seed_echo(self) -> int:
        return self.config.rng_seed

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "seed": self.seed_echo,
            "tf": self.impacted_tf.tf,
            "tf_changed": self.impacted_tf.tf != self.baseline_tf.tf,
            "order_changed": self.impacted_tf.developers != self.baseline_tf.developers,
            "kendall_tau": self.kendall_tau,
            "truck_factor": self.impacted_tf.to_dict(),
            "affected_files": {dev: sorted(paths) for dev, paths in sorted(self.affected_files.items())},
            "doe_deltas": [
                {"developer": dev, "path": path, "delta": delta}
                for (dev, path), delta in sorted(self.doe_deltas.items())
            ],
        }


def affected_count(impact_fraction: float, n_files: int) -> int:
    """round-half-up(fraction * n); the Decimal product keeps 0.1 * 5 at exactly 0.5."""
    product = Decimal(repr(impact_fraction)) * n_files
    return int(product.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def developer_seed(rng_seed: int, canonical_id: str) -> int:
    digest = hashlib.sha256(f"{rng_seed}\0{canonical_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def scenario_seed(master_seed: int, impact_fraction: float) -> int:
    digest = hashlib.sha256(f"{master_seed}\0{impact_fraction!r}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def select_affected_files(ledger: ContributionLedger, impact_fraction: float, rng_seed: int) -> dict[str, frozenset[str]]:
    selected: dict[str, frozenset[str]] = {}
    for dev, files in ledger.files_of().items():
        k = affected_count(impact_fraction, len(files))
        rng = random.Random(developer_seed(rng_seed, dev))
        selected[dev] = frozenset(rng.sample(files, k))
    return selected


def apply_copy_rate(
    ledger: ContributionLedger,
    affected: Mapping[str, frozenset[str] | set[str]],
    copy_rate: float,
    language_rates: Mapping[str, float] | None = None,
) -> ContributionLedger:
    """Scale every commit's added lines on affected pairs by ``1 - copy_rate``.

    ``language_rates`` optionally overrides the rate by file extension.
    """
    pairs: dict[Pair, PairContribution] = dict(ledger.pairs)
    for dev, paths in affected.items():
        for path in paths:
            contrib = pairs.get((dev, path))
            if contrib is None:
                raise UnknownPair(f"({dev}, {path}) is not in the ledger")
            rate = copy_rate
            if language_rates:
                suffix = path[path.rfind(".") :].lower() if "." in path else ""
                rate = language_rates.get(suffix, copy_rate)
            if rate:
                pairs[dev, path] = contrib.scaled(1 - rate)
    return ledger.replace_pairs(pairs)


def removal_ranks(order: Sequence[str], universe: Sequence[str]) -> dict[str, float]:
    """Rank developers by removal position; absentees tie just below the list."""
    pos = {dev: float(i) for i, dev in enumerate(order, 1)}
    bottom = float(len(order) + 1)
    return {dev: pos.get(dev, bottom) for dev in universe}


def compare_orders(baseline: Sequence[str], impacted: Sequence[str]) -> float | None:
    if list(baseline) == list(impacted):
        return 1.0
    universe = sorted(set(baseline) | set(impacted))
    try:
        return kendall_tau(removal_ranks(baseline, universe), removal_ranks(impacted, universe))
    except DegenerateRanking:
        return None


def run_scenario(
    ledger: ContributionLedger,
    config: ScenarioConfig,
    language_rates: Mapping[str, float] | None = None,
    baseline: tuple[ExpertiseMatrix, TruckFactorResult] | None = None,
) -> ScenarioResult:
    if baseline is None:
        base_matrix = compute_matrix(ledger, config.floor_days)
        base_tf = compute_truck_factor(identify_experts(base_matrix, config.thresholds), config.coverage)
    else:
        base_matrix, base_tf = baseline

    affected = select_affected_files(ledger, config.impact_fraction, config.rng_seed)
    impacted_ledger = apply_copy_rate(ledger, affected, config.copy_rate, language_rates)
    matrix = compute_matrix(impacted_ledger, config.floor_days)
    tf = compute_truck_factor(identify_experts(matrix, config.thresholds), config.coverage)

    deltas = {
        (dev, path): base_matrix.entries[dev, path] - matrix.entries[dev, path]
        for dev, paths in affected.items()
        for path in paths
    }
    return ScenarioResult(
        config=config,
        baseline_tf=base_tf,
        impacted_tf=tf,
        doe_deltas=deltas,
        kendall_tau=compare_orders(base_tf.developers, tf.developers),
        affected_files=affected,
        baseline_matrix=base_matrix,
        impacted_matrix=matrix,
    )


def run_sweep(
    ledger: ContributionLedger,
    fractions: Sequence[float] = DEFAULT_FRACTIONS,
    copy_rate: float = DEFAULT_COPY_RATE,
    master_seed: int = 0,
    thresholds: ExpertThresholds = ExpertThresholds(),
    coverage: float = DEFAULT_COVERAGE,
    floor_days: bool = False,
    language_rates: Mapping[str, float] | None = None,
) -> tuple[TruckFactorResult, list[ScenarioResult]]:
    """Run one scenario per impact fraction, each with a seed derived from ``master_seed``."""
    base_matrix = compute_matrix(ledger, floor_days)
    base_tf = compute_truck_factor(identify_experts(base_matrix, thresholds), coverage)
    results = []
    for fraction in fractions:
        config = ScenarioConfig(
            impact_fraction=fraction,
            copy_rate=copy_rate,
            rng_seed=scenario_seed(master_seed, fraction),
            thresholds=thresholds,
            coverage=coverage,
            floor_days=floor_days,
        )
        results.append(run_scenario(ledger, config, language_rates, baseline=(base_matrix, base_tf)))
    return base_tf, results
