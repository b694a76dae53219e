"""Report assembly: run manifests, JSON writing and the shipped schemas."""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import __version__
from .config import Settings, default_settings
from .scenario import ScenarioResult
from .truck_factor import ExpertThresholds, TruckFactorResult

NOTES = {
    "size_unchanged": "copy-rate deduction leaves file size (LOC) unchanged",
    "no_wall_clock": "reports carry no wall-clock time; reference_ts is the newest analysed commit",
}


@dataclass(frozen=True)
class RunManifest:
    command: str
    full_config: dict[str, Any]
    timestamps: dict[str, int] = field(default_factory=dict)
    tool_version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        return {
            "tool_version": self.tool_version,
            "command": self.command,
            "full_config": self.full_config,
            "timestamps": self.timestamps,
        }


def repo_identity(repo: str | Path, branch: str | None = None) -> dict[str, str]:
    """Name and resolved head of a repository; paths are left out so reports are portable."""
    repo = Path(repo)
    proc = subprocess.run(
        ["git", "-C", str(repo), "rev-parse", "--verify", "--quiet", f"{branch or 'HEAD'}^{{commit}}"],
        capture_output=True,
    )
    return {"name": repo.resolve().name, "head": proc.stdout.decode().strip()}


def manifest_for(command: str, settings: Settings, extra: dict[str, Any] | None = None, reference_ts: int | None = None) -> RunManifest:
    config = settings.to_dict()
    # Output placement does not affect report content.
    for key in ("out_dir", "jobs", "format"):
        config.pop(key, None)
    config.update(extra or {})
    timestamps = {} if reference_ts is None else {"reference_ts": reference_ts}
    return RunManifest(command=command, full_config=config, timestamps=timestamps)


def settings_from_manifest(manifest: Mapping[str, Any]) -> Settings:
    """Rebuild the settings a report was produced with from its embedded manifest."""
    config = manifest["full_config"]
    known = {f.name for f in fields(Settings)}
    values = {k: v for k, v in config.items() if k in known}
    if "fractions" in values:
        values["fractions"] = tuple(values["fractions"])
    if values.get("extensions") is not None:
        values["extensions"] = tuple(values["extensions"])
    return replace(default_settings(), **values)


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def load_schema(name: str) -> dict[str, Any]:
    return json.loads(resources.files(__package__).joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8"))


def truck_factor_report(manifest: RunManifest, result: TruckFactorResult, thresholds: ExpertThresholds, total_files: int) -> dict[str, Any]:
    return {
        "manifest": manifest.to_dict(),
        **result.to_dict(thresholds),
        "total_files": total_files,
    }


def summary_label(fraction: float) -> str:
    return f"TF_{round(fraction * 100)}"


def summary_row(baseline: TruckFactorResult, scenarios: Sequence[ScenarioResult]) -> dict[str, int]:
    row = {"TF": baseline.tf}
    for s in scenarios:
        row[summary_label(s.config.impact_fraction)] = s.impacted_tf.tf
    return row


def simulate_report(
    manifest: RunManifest,
    baseline: TruckFactorResult,
    scenarios: Sequence[ScenarioResult],
    total_files: int,
) -> dict[str, Any]:
    return {
        "manifest": manifest.to_dict(),
        "total_files": total_files,
        "baseline": baseline.to_dict(),
        "scenarios": [s.to_dict() for s in scenarios],
        "summary": summary_row(baseline, scenarios),
        "notes": [NOTES["size_unchanged"], NOTES["no_wall_clock"]],
    }


def summary_csv(rows: Sequence[tuple[str, dict[str, int]]]) -> str:
    columns: list[str] = []
    for _, row in rows:
        columns.extend(c for c in row if c not in columns)
    lines = [",".join(["repository", *columns])]
    for name, row in rows:
        lines.append(",".join([name, *(str(row.get(c, "")) for c in columns)]))
    return "\n".join(lines) + "\n"
