"""Contribution ledger: the per-developer, per-file history facts DOE consumes."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

Pair = tuple[str, str]  # (canonical_id, path)


@dataclass(frozen=True)
class AuthorIdentity:
    canonical_id: str
    display_name: str
    emails: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.canonical_id:
            raise ValueError("canonical_id must be non-empty")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AuthorIdentity):
            return NotImplemented
        return self.canonical_id == other.canonical_id

    def __hash__(self) -> int:
        return hash(self.canonical_id)


@dataclass(frozen=True)
class PairContribution:
    """What one developer did to one file.

    ``per_commit_adds`` keeps the history order so a copy-rate deduction can be
    applied commit by commit.
    """

    per_commit_adds: tuple[tuple[str, float], ...]
    is_first_author: bool
    last_commit_ts: int

    @property
    def total_adds(self) -> float:
        return sum(adds for _, adds in self.per_commit_adds)

    def scaled(self, factor: float) -> PairContribution:
        return PairContribution(
            per_commit_adds=tuple((sha, adds * factor) for sha, adds in self.per_commit_adds),
            is_first_author=self.is_first_author,
            last_commit_ts=self.last_commit_ts,
        )


@dataclass(frozen=True)
class ContributionLedger:
    pairs: Mapping[Pair, PairContribution]
    file_sizes: Mapping[str, int]
    reference_ts: int
    developers: Mapping[str, AuthorIdentity] = field(default_factory=dict)

    def validate(self) -> None:
        first_authors: dict[str, str] = {}
        for (dev, path), contrib in self.pairs.items():
            if path not in self.file_sizes:
                raise ValueError(f"pair ({dev}, {path}) references a file without size")
            if contrib.last_commit_ts > self.reference_ts:
                raise ValueError(f"last commit of ({dev}, {path}) is after the reference time")
            if any(adds < 0 for _, adds in contrib.per_commit_adds):
                raise ValueError(f"negative adds for ({dev}, {path})")
            if contrib.is_first_author:
                if path in first_authors:
                    raise ValueError(f"{path} has two first authors: {first_authors[path]}, {dev}")
                first_authors[path] = dev
        for path, size in self.file_sizes.items():
            if size < 0:
                raise ValueError(f"negative size for {path}")

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)

    def files_of(self) -> dict[str, list[str]]:
        """Map each developer to the sorted list of files they touched."""
        out: dict[str, list[str]] = {}
        for dev, path in self.sorted_pairs():
            out.setdefault(dev, []).append(path)
        return out

    def replace_pairs(self, pairs: Mapping[Pair, PairContribution]) -> ContributionLedger:
        return ContributionLedger(
            pairs=dict(pairs),
            file_sizes=self.file_sizes,
            reference_ts=self.reference_ts,
            developers=self.developers,
        )

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "reference_ts": self.reference_ts,
            "files": {path: self.file_sizes[path] for path in sorted(self.file_sizes)},
            "developers": {
                cid: {
                    "display_name": ident.display_name,
                    "emails": sorted(ident.emails),
                }
                for cid, ident in sorted(self.developers.items())
            },
            "pairs": [
                {
                    "developer": dev,
                    "path": path,
                    "total_adds": self.pairs[dev, path].total_adds,
                    "is_first_author": self.pairs[dev, path].is_first_author,
                    "last_commit_ts": self.pairs[dev, path].last_commit_ts,
                    "per_commit_adds": [list(entry) for entry in self.pairs[dev, path].per_commit_adds],
                }
                for dev, path in self.sorted_pairs()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ContributionLedger:
        pairs = {
            (row["developer"], row["path"]): PairContribution(
                per_commit_adds=tuple((sha, adds) for sha, adds in row["per_commit_adds"]),
                is_first_author=bool(row["is_first_author"]),
                last_commit_ts=int(row["last_commit_ts"]),
            )
            for row in data["pairs"]
        }
        developers = {
            cid: AuthorIdentity(cid, info["display_name"], frozenset(info["emails"]))
            for cid, info in data.get("developers", {}).items()
        }
        return cls(
            pairs=pairs,
            file_sizes=dict(data["files"]),
            reference_ts=int(data["reference_ts"]),
            developers=developers,
        )

    @classmethod
    def from_json(cls, text: str) -> ContributionLedger:
        return cls.from_dict(json.loads(text))

    def csv_rows(self) -> Iterable[list[Any]]:
        for dev, path in self.sorted_pairs():
            contrib = self.pairs[dev, path]
            yield [
                dev,
                path,
                contrib.total_adds,
                int(contrib.is_first_author),
                contrib.last_commit_ts,
                self.file_sizes[path],
            ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["canonical_id", "path", "adds", "fa", "last_commit_ts", "size_loc"])
        writer.writerows(self.csv_rows())
        return buf.getvalue()
