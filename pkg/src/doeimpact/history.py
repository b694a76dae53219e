"""Git history ingestion.

Walks ``git log`` once (``-z --raw --numstat``), replays file creations,
deletions and renames in topological order, and keeps the contribution facts
for every file still present at the reference revision.
"""

from __future__ import annotations

import logging
import os
import subprocess
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import IO, Iterator, Mapping

from .errors import BinaryFile, EmptyHistory, NotARepository, UnreadableObject
from .ledger import AuthorIdentity, ContributionLedger, PairContribution

logger = logging.getLogger(__name__)

# Extensions of the ten most popular GitHub languages of 2022.
DEFAULT_EXTENSIONS: tuple[str, ...] = (
    # JavaScript
    ".js", ".jsx", ".mjs", ".cjs",
    # Python
    ".py",
    # Java
    ".java",
    # TypeScript
    ".ts", ".tsx",
    # C#
    ".cs",
    # C++
    ".cpp", ".cc", ".cxx", ".c++", ".hpp", ".hh", ".hxx",
    # PHP
    ".php",
    # Shell
    ".sh", ".bash", ".zsh",
    # C
    ".c", ".h",
    # Ruby
    ".rb",
)

BINARY_SNIFF_BYTES = 8000


@dataclass(frozen=True)
class FileChange:
    path: str
    lines_added: int
    lines_deleted: int
    is_creation: bool = False
    is_deletion: bool = False
    old_path: str | None = None  # set for followed renames

    def __post_init__(self) -> None:
        if self.lines_added < 0 or self.lines_deleted < 0:
            raise ValueError("line counts must be non-negative")
        if self.is_creation and self.is_deletion:
            raise ValueError("a change cannot both create and delete a file")


@dataclass(frozen=True)
class CommitRecord:
    commit_id: str
    author: AuthorIdentity
    timestamp: int
    changes: tuple[FileChange, ...]
    parents: tuple[str, ...] = ()


@dataclass(frozen=True)
class IngestConfig:
    branch: str | None = None
    # None analyses every text file regardless of extension.
    extensions: tuple[str, ...] | None = DEFAULT_EXTENSIONS
    follow_renames: bool = False
    # Walk only the first-parent chain, diffing merges against their first parent.
    first_parent: bool = False
    alias_map: Mapping[str, str] = field(default_factory=dict)

    def accepts(self, path: str) -> bool:
        if self.extensions is None:
            return True
        suffix = PurePosixPath(path).suffix.lower()
        return suffix in self.extensions


# -- identities --------------------------------------------------------------


def resolve_identity(name: str, email: str, alias_map: Mapping[str, str] | None = None) -> AuthorIdentity:
    alias_map = alias_map or {}
    email_key = email.strip().lower()
    canonical = (
        alias_map.get(f"{name} <{email}>")
        or alias_map.get(f"{name} <{email}>".lower())
        or (alias_map.get(email_key) if email_key else None)
        or email_key
        or name.strip().lower()
    )
    emails = frozenset({email_key}) if email_key else frozenset()
    return AuthorIdentity(canonical_id=canonical, display_name=name, emails=emails)


def load_alias_map(path: str | os.PathLike[str]) -> dict[str, str]:
    """Read ``alias canonical`` pairs, one per line; ``#`` starts a comment.

    The alias may be a bare email or ``Name <email>``; the canonical id is the
    last whitespace-separated field.
    """
    aliases: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.rsplit(None, 1)
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'alias canonical'")
        alias, canonical = parts
        key = alias.lower() if "<" not in alias else alias
        aliases[key] = canonical.lower()
    return aliases


# -- LOC ---------------------------------------------------------------------


def count_file_loc(blob: bytes) -> int:
    if b"\0" in blob[:BINARY_SNIFF_BYTES]:
        raise BinaryFile("NUL byte found; treating content as binary")
    if not blob:
        return 0
    return blob.count(b"\n") + (0 if blob.endswith(b"\n") else 1)


# -- git plumbing ------------------------------------------------------------


def _git(repo: Path, *args: str, check: bool = True) -> subprocess.CompletedProcess[bytes]:
    proc = subprocess.run(["git", "-C", str(repo), *args], capture_output=True)
    if check and proc.returncode != 0:
        raise UnreadableObject(" ".join(args), proc.stderr.decode("utf-8", "replace").strip())
    return proc


def _decode(raw: bytes) -> str:
    return raw.decode("utf-8", "replace")


def _check_repository(repo: Path) -> None:
    if not repo.is_dir():
        raise NotARepository(f"{repo} does not exist or is not a directory")
    proc = _git(repo, "rev-parse", "--git-dir", check=False)
    if proc.returncode != 0:
        raise NotARepository(f"{repo} is not a git repository")


def _resolve_revision(repo: Path, branch: str | None) -> str:
    rev = branch or "HEAD"
    proc = _git(repo, "rev-parse", "--verify", "--quiet", f"{rev}^{{commit}}", check=False)
    if proc.returncode != 0:
        raise EmptyHistory(f"no commits found on {rev!r}")
    return _decode(proc.stdout).strip()


def _iter_tokens(stream: IO[bytes], chunk_size: int = 1 << 20) -> Iterator[bytes]:
    pending = b""
    while True:
        chunk = stream.read(chunk_size)
        if not chunk:
            break
        pending += chunk
        *complete, pending = pending.split(b"\0")
        yield from complete
    if pending:
        yield pending


LOG_FORMAT = "%x00%H%x00%at%x00%an%x00%ae%x00%P"


def parse_log_tokens(tokens: Iterator[bytes], alias_map: Mapping[str, str] | None = None) -> Iterator[CommitRecord]:
    """Turn the NUL-separated ``git log -z --raw --numstat`` stream into commits.

    Layout per commit: ``"" sha ts name email parents`` followed by raw entries
    (``:modes shas STATUS`` then one or two paths) and numstat entries
    (``added<TAB>deleted<TAB>path``, or an empty path followed by old and new
    for renames). An empty token starts the next commit.
    """
    toks = iter(tokens)

    def take() -> str:
        try:
            return _decode(next(toks))
        except StopIteration:
            raise UnreadableObject("log stream", "truncated git log output") from None

    for raw in toks:
        if raw == b"":
            continue
        sha = _decode(raw)
        ts = int(take())
        name, email = take(), take()
        parents = tuple(take().split())
        statuses: dict[str, tuple[str, str | None]] = {}
        numstat: dict[str, tuple[int, int]] = {}
        order: list[str] = []
        for raw_entry in toks:
            entry = _decode(raw_entry)
            if entry == "":
                break
            entry = entry.lstrip("\n")
            if entry.startswith(":"):
                status = entry.split()[-1]
                if status[0] in "RC":
                    old, new = take(), take()
                    statuses[new] = (status[0], old)
                    order.append(new)
                else:
                    path = take()
                    statuses[path] = (status[0], None)
                    order.append(path)
            elif "\t" in entry:
                added, deleted, path = entry.split("\t", 2)
                if path == "":
                    take()
                    path = take()
                numstat[path] = (
                    int(added) if added.isdigit() else 0,
                    int(deleted) if deleted.isdigit() else 0,
                )
            else:
                raise UnreadableObject(sha, f"unexpected log entry {entry!r}")
        changes = []
        for path in order:
            status, old = statuses[path]
            added, deleted = numstat.get(path, (0, 0))
            changes.append(
                FileChange(
                    path=path,
                    lines_added=added,
                    lines_deleted=deleted,
                    is_creation=status == "A",
                    is_deletion=status == "D",
                    old_path=old if status == "R" else None,
                )
            )
        yield CommitRecord(
            commit_id=sha,
            author=resolve_identity(name, email, alias_map),
            timestamp=ts,
            changes=tuple(changes),
            parents=parents,
        )


def iter_commits(repo: str | os.PathLike[str], config: IngestConfig | None = None) -> Iterator[CommitRecord]:
    """Yield analysed commits oldest first (parents before children)."""
    config = config or IngestConfig()
    repo = Path(repo)
    _check_repository(repo)
    rev = _resolve_revision(repo, config.branch)
    args = [
        "git", "-C", str(repo), "log", rev,
        "--reverse", "--topo-order", "-z", "--raw", "--numstat", "--no-abbrev",
        "--no-color", "--no-ext-diff", "--encoding=UTF-8", f"--format={LOG_FORMAT}",
        "-M" if config.follow_renames else "--no-renames",
    ]
    if config.first_parent:
        args += ["--first-parent", "--diff-merges=first-parent"]
    proc = subprocess.Popen(args, stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    assert proc.stdout is not None
    completed = False
    try:
        yield from parse_log_tokens(_iter_tokens(proc.stdout), config.alias_map)
        completed = True
    finally:
        proc.stdout.close()
        stderr = proc.stderr.read() if proc.stderr else b""
        returncode = proc.wait()
        if proc.stderr:
            proc.stderr.close()
    if completed and returncode != 0:
        raise UnreadableObject(rev, _decode(stderr).strip())


def _list_tree(repo: Path, rev: str) -> dict[str, str]:
    """Map path -> blob id for regular files at ``rev``."""
    out = _git(repo, "ls-tree", "-r", "-z", "--full-tree", rev).stdout
    files: dict[str, str] = {}
    for entry in out.split(b"\0"):
        if not entry:
            continue
        meta, path = entry.split(b"\t", 1)
        mode, kind, sha = meta.split()
        if kind != b"blob" or mode not in (b"100644", b"100755"):
            continue
        files[_decode(path)] = _decode(sha)
    return files


def _read_blobs(repo: Path, shas: list[str]) -> Iterator[tuple[str, bytes]]:
    proc = subprocess.Popen(
        ["git", "-C", str(repo), "cat-file", "--batch"],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    assert proc.stdin is not None and proc.stdout is not None
    try:
        for sha in shas:
            proc.stdin.write(sha.encode() + b"\n")
            proc.stdin.flush()
            header = proc.stdout.readline().split()
            if len(header) != 3 or header[1] != b"blob":
                raise UnreadableObject(sha, "missing or not a blob")
            size = int(header[2])
            data = proc.stdout.read(size)
            proc.stdout.read(1)  # trailing LF
            if len(data) != size:
                raise UnreadableObject(sha, "short read")
            yield sha, data
    finally:
        proc.stdin.close()
        proc.stdout.close()
        if proc.stderr:
            proc.stderr.close()
        proc.wait()


@dataclass
class _PairState:
    commits: list[tuple[str, int]] = field(default_factory=list)
    last_ts: int = 0


def ingest_repository(repo_path: str | os.PathLike[str], config: IngestConfig | None = None) -> ContributionLedger:
    config = config or IngestConfig()
    repo = Path(repo_path)
    _check_repository(repo)
    rev = _resolve_revision(repo, config.branch)

    state: dict[str, dict[str, _PairState]] = {}
    creators: dict[str, str] = {}
    identities: dict[str, AuthorIdentity] = {}
    reference_ts: int | None = None
    # Renamed files may change extension; filter at the end in that case.
    early_filter = not config.follow_renames

    for commit in iter_commits(repo, config):
        dev = commit.author.canonical_id
        known = identities.get(dev)
        if known is None:
            identities[dev] = commit.author
        elif not commit.author.emails <= known.emails:
            identities[dev] = AuthorIdentity(dev, known.display_name, known.emails | commit.author.emails)
        reference_ts = commit.timestamp if reference_ts is None else max(reference_ts, commit.timestamp)

        for change in commit.changes:
            path = change.path
            if early_filter and not config.accepts(path):
                continue
            if change.is_deletion:
                state.pop(path, None)
                creators.pop(path, None)
                continue
            if change.is_creation:
                state[path] = {}
                creators[path] = dev
            elif change.old_path is not None:
                state[path] = state.pop(change.old_path, {})
                if change.old_path in creators:
                    creators[path] = creators.pop(change.old_path)
                else:
                    creators.pop(path, None)
            pair = state.setdefault(path, {}).setdefault(dev, _PairState())
            pair.commits.append((commit.commit_id, change.lines_added))
            pair.last_ts = max(pair.last_ts, commit.timestamp)

    if reference_ts is None:
        raise EmptyHistory(f"no commits found on {config.branch or 'HEAD'!r}")

    tree = {path: sha for path, sha in _list_tree(repo, rev).items() if path in state and config.accepts(path)}
    paths = sorted(tree)
    sizes: dict[str, int] = {}
    for path, (_, blob) in zip(paths, _read_blobs(repo, [tree[p] for p in paths])):
        try:
            loc = count_file_loc(blob)
        except BinaryFile:
            logger.debug("skipping binary file %s", path)
            continue
        if loc > 0:
            sizes[path] = loc

    pairs: dict[tuple[str, str], PairContribution] = {}
    for path in sizes:
        for dev, pair in state[path].items():
            pairs[dev, path] = PairContribution(
                per_commit_adds=tuple(pair.commits),
                is_first_author=creators.get(path) == dev,
                last_commit_ts=pair.last_ts,
            )
    devs = {dev for dev, _ in pairs}
    return ContributionLedger(
        pairs=dict(sorted(pairs.items())),
        file_sizes=sizes,
        reference_ts=reference_ts,
        developers={dev: identities[dev] for dev in sorted(devs)},
    )
