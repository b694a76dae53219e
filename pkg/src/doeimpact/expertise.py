"""Degree of Expertise (DOE) over a contribution ledger."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any, Mapping

from .errors import DomainError
from .ledger import ContributionLedger, Pair

INTERCEPT = 5.28223
ADDS_COEF = 0.23173
FA_COEF = 0.36151
SIZE_COEF = -0.28761
NUM_DAYS_COEF = -0.19421

SECONDS_PER_DAY = 86400


@dataclass(frozen=True)
class DoeInput:
    adds: float
    fa: int
    size_loc: int
    num_days: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.adds) and math.isfinite(self.num_days)):
            raise DomainError("adds and num_days must be finite")
        if self.adds < 0:
            raise DomainError(f"adds must be >= 0, got {self.adds}")
        if self.fa not in (0, 1):
            raise DomainError(f"fa must be 0 or 1, got {self.fa}")
        if self.size_loc < 1:
            raise DomainError(f"size_loc must be >= 1, got {self.size_loc}")
        if self.num_days < 0:
            raise DomainError(f"num_days must be >= 0, got {self.num_days}")

    @property
    def doe(self) -> float:
        return compute_doe(self.adds, self.fa, self.size_loc, self.num_days)


def compute_doe(adds: float, fa: int | bool, size_loc: int, num_days: float) -> float:
    """DOE of a developer on a file; natural logs, no clamping."""
    if size_loc < 1:
        raise DomainError(f"size_loc must be >= 1, got {size_loc}")
    return (
        INTERCEPT
        + ADDS_COEF * math.log1p(adds)
        + FA_COEF * int(fa)
        + SIZE_COEF * math.log(size_loc)
        + NUM_DAYS_COEF * math.log1p(num_days)
    )


def num_days_between(last_commit_ts: int, reference_ts: int, floor_days: bool = False) -> float:
    days = (reference_ts - last_commit_ts) / SECONDS_PER_DAY
    return float(math.floor(days)) if floor_days else days


@dataclass(frozen=True)
class ExpertiseMatrix:
    entries: Mapping[Pair, float]
    max_doe: Mapping[str, float]
    # Only present for files whose max DOE is positive.
    normalized: Mapping[Pair, float]

    @property
    def files(self) -> list[str]:
        return sorted(self.max_doe)

    def by_file(self) -> dict[str, dict[str, float]]:
        out: dict[str, dict[str, float]] = {}
        for (dev, path), doe in sorted(self.entries.items()):
            out.setdefault(path, {})[dev] = doe
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "files": {path: self.max_doe[path] for path in self.files},
            "entries": [
                {
                    "developer": dev,
                    "path": path,
                    "doe": self.entries[dev, path],
                    "ndoe": self.normalized.get((dev, path)),
                }
                for dev, path in sorted(self.entries)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["canonical_id", "path", "doe", "ndoe"])
        for dev, path in sorted(self.entries):
            ndoe = self.normalized.get((dev, path))
            writer.writerow([dev, path, repr(self.entries[dev, path]), "" if ndoe is None else repr(ndoe)])
        return buf.getvalue()


def normalize(entries: Mapping[Pair, float]) -> tuple[dict[str, float], dict[Pair, float]]:
    max_doe: dict[str, float] = {}
    for (_, path), doe in entries.items():
        if path not in max_doe or doe > max_doe[path]:
            max_doe[path] = doe
    normalized = {
        (dev, path): doe / max_doe[path]
        for (dev, path), doe in entries.items()
        if max_doe[path] > 0
    }
    return max_doe, normalized


def compute_matrix(ledger: ContributionLedger, floor_days: bool = False) -> ExpertiseMatrix:
    entries: dict[Pair, float] = {}
    for (dev, path), contrib in sorted(ledger.pairs.items()):
        days = num_days_between(contrib.last_commit_ts, ledger.reference_ts, floor_days)
        try:
            entries[dev, path] = DoeInput(
                adds=contrib.total_adds,
                fa=int(contrib.is_first_author),
                size_loc=ledger.file_sizes[path],
                num_days=days,
            ).doe
        except DomainError as exc:
            raise DomainError(f"({dev}, {path}): {exc}") from exc
    max_doe, normalized = normalize(entries)
    return ExpertiseMatrix(entries=entries, max_doe=max_doe, normalized=normalized)
