"""Expert identification and greedy Truck Factor estimation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import NoFiles
from .expertise import ExpertiseMatrix

DEFAULT_COVERAGE = 0.5


@dataclass(frozen=True)
class ExpertThresholds:
    normalized_min: float = 0.75
    absolute_min: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.normalized_min <= 1:
            raise ValueError(f"normalized_min must be in (0, 1], got {self.normalized_min}")

    def to_dict(self) -> dict[str, float]:
        return {"normalized_min": self.normalized_min, "absolute_min": self.absolute_min}


@dataclass(frozen=True)
class ExpertAssignment:
    experts: Mapping[str, frozenset[str]]
    # Files beyond those listed in ``experts`` have no expert.
    total_files: int

    def __post_init__(self) -> None:
        if self.total_files < len(self.experts):
            raise ValueError(f"total_files={self.total_files} is below the {len(self.experts)} listed files")

    @classmethod
    def from_sets(cls, experts: Mapping[str, set[str] | frozenset[str]]) -> ExpertAssignment:
        return cls({path: frozenset(devs) for path, devs in experts.items()}, len(experts))

    @property
    def developers(self) -> set[str]:
        return set().union(*self.experts.values()) if self.experts else set()


@dataclass(frozen=True)
class TruckFactorResult:
    tf: int
    removal_order: tuple[tuple[str, int], ...]
    abandonment_trace: tuple[float, ...]
    coverage: float = DEFAULT_COVERAGE
    exhausted: bool = False
    initial_abandoned: float = 0.0

    @property
    def developers(self) -> list[str]:
        return [dev for dev, _ in self.removal_order]

    def to_dict(self, thresholds: ExpertThresholds | None = None) -> dict[str, Any]:
        out: dict[str, Any] = {
            "tf": self.tf,
            "coverage": self.coverage,
            "removal_order": [{"developer": dev, "files": n} for dev, n in self.removal_order],
            "abandonment_trace": list(self.abandonment_trace),
            "initial_abandoned": self.initial_abandoned,
            "exhausted": self.exhausted,
        }
        if thresholds is not None:
            out["thresholds"] = thresholds.to_dict()
        return out


def identify_experts(matrix: ExpertiseMatrix, thresholds: ExpertThresholds = ExpertThresholds()) -> ExpertAssignment:
    experts: dict[str, set[str]] = {path: set() for path in matrix.max_doe}
    for (dev, path), ndoe in matrix.normalized.items():
        if ndoe >= thresholds.normalized_min and matrix.entries[dev, path] > thresholds.absolute_min:
            experts[path].add(dev)
    return ExpertAssignment.from_sets(experts)


def compute_truck_factor(assignment: ExpertAssignment, coverage: float = DEFAULT_COVERAGE) -> TruckFactorResult:
    """Remove top experts one at a time until more than ``coverage`` of files are orphaned.

    Each round removes the developer who is expert of the most files still
    covered, ties going to the smallest canonical id. Files that start with no
    expert count as abandoned from the outset.
    """
    if not 0 < coverage < 1:
        raise ValueError(f"coverage must be in (0, 1), got {coverage}")
    total = assignment.total_files
    if total <= 0:
        raise NoFiles("cannot compute a Truck Factor without files")

    remaining = {path: set(devs) for path, devs in assignment.experts.items()}
    # developer -> files they are still expert of
    owned: dict[str, set[str]] = {}
    for path, devs in remaining.items():
        for dev in devs:
            owned.setdefault(dev, set()).add(path)

    abandoned = total - sum(1 for devs in remaining.values() if devs)
    initial = abandoned / total
    order: list[tuple[str, int]] = []
    trace: list[float] = []
    while abandoned / total <= coverage and owned:
        dev = min(owned, key=lambda d: (-len(owned[d]), d))
        files = owned.pop(dev)
        order.append((dev, len(files)))
        for path in files:
            devs = remaining[path]
            devs.discard(dev)
            if not devs:
                abandoned += 1
        trace.append(abandoned / total)
    return TruckFactorResult(
        tf=len(order),
        removal_order=tuple(order),
        abandonment_trace=tuple(trace),
        coverage=coverage,
        exhausted=abandoned / total <= coverage,
        initial_abandoned=initial,
    )
