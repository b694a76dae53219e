"""scan -> fetch -> match -> aggregate, over fixture directories or git corpora."""

from __future__ import annotations

import json
import logging
import subprocess
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import DoeImpactError, LinkDisabled, NoCodeSnippets, UnreadableObject
from ..history import DEFAULT_EXTENSIONS
from .conversation import Conversation, count_turns, parse_share_page
from .fetch import PageFetcher, fetch_many
from .matching import MatchReport, match_lines, parse_added_lines
from .patterns import SharedLinkRecord, scan_for_links

logger = logging.getLogger(__name__)


@dataclass
class MiningOutcome:
    records: list[SharedLinkRecord] = field(default_factory=list)
    reports: list[MatchReport] = field(default_factory=list)
    turns: list[int] = field(default_factory=list)
    # url -> error class name for links that did not yield a usable conversation
    failures: dict[str, str] = field(default_factory=dict)

    def failure_counts(self) -> dict[str, int]:
        return dict(sorted(Counter(self.failures.values()).items()))

    @property
    def all_disabled(self) -> bool:
        return bool(self.failures) and not self.reports and set(self.failures.values()) == {"LinkDisabled"}


@dataclass
class FixturePair:
    directory: Path
    url: str
    file_path: str
    added_lines: list[str]
    page_html: str | None
    recorded: Conversation | None
    http_status: int = 200


def load_fixture_pair(directory: str | Path) -> FixturePair:
    d = Path(directory)
    meta: dict[str, Any] = {}
    if (d / "meta.json").exists():
        meta = json.loads((d / "meta.json").read_text(encoding="utf-8"))
    page = d / "page.html"
    conv = d / "conversation.json"
    diff = d / "diff.txt"
    return FixturePair(
        directory=d,
        url=meta.get("url", f"https://chatgpt.com/share/{d.name}"),
        file_path=meta.get("file_path", ""),
        added_lines=parse_added_lines(diff.read_text(encoding="utf-8")) if diff.exists() else [],
        page_html=page.read_text(encoding="utf-8") if page.exists() else None,
        recorded=Conversation.from_dict(json.loads(conv.read_text(encoding="utf-8"))) if conv.exists() else None,
        http_status=int(meta.get("http_status", 200)),
    )


def mine_fixtures(root: str | Path, trim: bool = True) -> MiningOutcome:
    """Match every fixture pair directory under ``root`` (sorted by name).

    The recorded page is parsed when present; ``conversation.json`` is only a
    fallback for pairs recorded without a page.
    """
    outcome = MiningOutcome()
    for directory in sorted(p for p in Path(root).iterdir() if p.is_dir()):
        pair = load_fixture_pair(directory)
        outcome.records.append(SharedLinkRecord(file_path=pair.file_path, url=pair.url))
        try:
            if pair.http_status in (403, 404, 410):
                raise LinkDisabled(f"HTTP {pair.http_status}")
            if pair.page_html is not None:
                conversation = parse_share_page(pair.page_html)
            elif pair.recorded is not None:
                conversation = pair.recorded
                if not conversation.code_blocks:
                    raise NoCodeSnippets("recorded conversation has no code")
            else:
                raise LinkDisabled("no recorded page")
        except DoeImpactError as exc:
            outcome.failures[pair.url] = exc.code
            continue
        outcome.turns.append(count_turns(conversation))
        outcome.reports.append(
            match_lines(conversation.code_blocks, pair.added_lines, trim=trim, file_path=pair.file_path, url=pair.url)
        )
    return outcome


# -- git corpora -------------------------------------------------------------


def _git(repo: Path, *args: str) -> str:
    proc = subprocess.run(["git", "-C", str(repo), *args], capture_output=True)
    if proc.returncode != 0:
        raise UnreadableObject(" ".join(args[:2]), proc.stderr.decode("utf-8", "replace").strip())
    return proc.stdout.decode("utf-8", "replace")


def find_repositories(corpus: str | Path) -> list[Path]:
    root = Path(corpus)
    if (root / ".git").exists():
        return [root]
    return sorted(p for p in root.iterdir() if p.is_dir() and (p / ".git").exists())


def introducing_commit(repo: Path, path: str, url: str) -> str:
    """Oldest commit whose diff changes the number of occurrences of ``url`` in ``path``."""
    out = _git(repo, "log", "--reverse", "--format=%H", "--no-renames", "-S", url, "--", path)
    commits = out.split()
    if not commits:
        raise UnreadableObject(path, f"no commit introduces {url}")
    return commits[0]


def commit_added_lines(repo: Path, commit: str, path: str) -> list[str]:
    diff = _git(repo, "show", "--format=", "--no-color", "--no-ext-diff", "--no-renames", "-U0", commit, "--", path)
    return parse_added_lines(diff)


def scan_repository(repo: Path, extensions: tuple[str, ...] | None = DEFAULT_EXTENSIONS) -> list[SharedLinkRecord]:
    contents: dict[str, str] = {}
    for path in _git(repo, "ls-files", "-z").split("\0"):
        if not path or (extensions is not None and Path(path).suffix.lower() not in extensions):
            continue
        file = repo / path
        if file.is_file():
            contents[path] = file.read_bytes().decode("utf-8", "replace")
    records = scan_for_links(contents, repo_id=repo.name)
    return [
        SharedLinkRecord(r.file_path, r.url, r.repo_id, introducing_commit(repo, r.file_path, r.url))
        for r in records
    ]


def mine_corpus(
    corpus: str | Path,
    fetcher: PageFetcher,
    parallelism: int = 4,
    trim: bool = True,
    extensions: tuple[str, ...] | None = DEFAULT_EXTENSIONS,
) -> MiningOutcome:
    outcome = MiningOutcome()
    repos = {repo.name: repo for repo in find_repositories(corpus)}
    for repo in repos.values():
        outcome.records.extend(scan_repository(repo, extensions))
    conversations = fetch_many((r.url for r in outcome.records), fetcher, parallelism)
    for url, result in sorted(conversations.items()):
        if isinstance(result, DoeImpactError):
            outcome.failures[url] = result.code
        else:
            outcome.turns.append(count_turns(result))
    for record in outcome.records:
        conversation = conversations[record.url]
        if isinstance(conversation, DoeImpactError):
            continue
        added = commit_added_lines(repos[record.repo_id], record.introducing_commit, record.file_path)
        outcome.reports.append(
            match_lines(
                conversation.code_blocks,
                added,
                trim=trim,
                file_path=f"{record.repo_id}/{record.file_path}",
                url=record.url,
            )
        )
    return outcome
