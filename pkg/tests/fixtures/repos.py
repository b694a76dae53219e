"""Deterministic fixture repositories built from scripted histories.

Author, committer and dates are pinned, so object ids are stable across
machines. Run as a script to materialise every repository under a directory:

    python3 tests/fixtures/repos.py /tmp/fixture-repos
"""

from __future__ import annotations

import os
import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path

DAY = 86400
EPOCH = 1_700_000_000  # 2023-11-14T22:13:20Z

PEOPLE = {
    "alice": ("Alice", "alice@example.org"),
    "bob": ("Bob", "bob@example.org"),
    "carol": ("Carol", "carol@example.org"),
}


@dataclass
class Commit:
    author: str
    day: float
    writes: dict[str, str | None] = field(default_factory=dict)  # None deletes
    renames: dict[str, str] = field(default_factory=dict)
    message: str = ""


@dataclass
class Branch:
    name: str


@dataclass
class Checkout:
    name: str


@dataclass
class Merge:
    author: str
    day: float
    branch: str


def lines(prefix: str, n: int, start: int = 0) -> str:
    return "".join(f"{prefix}_{i} = {i}\n" for i in range(start, start + n))


def _run(repo: Path, env: dict[str, str], *args: str) -> None:
    subprocess.run(["git", "-C", str(repo), *args], env=env, check=True, capture_output=True)


def _env(author: str, day: float) -> dict[str, str]:
    name, email = PEOPLE[author]
    stamp = f"@{EPOCH + int(day * DAY)} +0000"
    env = {k: v for k, v in os.environ.items() if not k.startswith("GIT_")}
    env.update(
        GIT_AUTHOR_NAME=name,
        GIT_AUTHOR_EMAIL=email,
        GIT_AUTHOR_DATE=stamp,
        GIT_COMMITTER_NAME=name,
        GIT_COMMITTER_EMAIL=email,
        GIT_COMMITTER_DATE=stamp,
        GIT_CONFIG_GLOBAL=os.devnull,
        GIT_CONFIG_NOSYSTEM="1",
    )
    return env


def build(path: str | Path, steps: list) -> Path:
    repo = Path(path)
    repo.mkdir(parents=True, exist_ok=False)
    env = _env("alice", 0)
    _run(repo, env, "init", "-q", "-b", "main")
    _run(repo, env, "config", "commit.gpgsign", "false")
    for n, step in enumerate(steps):
        if isinstance(step, Branch):
            _run(repo, env, "branch", step.name)
        elif isinstance(step, Checkout):
            _run(repo, env, "checkout", "-q", step.name)
        elif isinstance(step, Merge):
            _run(repo, _env(step.author, step.day), "merge", "-q", "--no-ff", "-m", f"merge {step.branch}", step.branch)
        else:
            env = _env(step.author, step.day)
            for old, new in step.renames.items():
                _run(repo, env, "mv", old, new)
            for rel, text in step.writes.items():
                target = repo / rel
                if text is None:
                    _run(repo, env, "rm", "-q", rel)
                else:
                    target.parent.mkdir(parents=True, exist_ok=True)
                    target.write_text(text, encoding="utf-8")
                    _run(repo, env, "add", rel)
            _run(repo, env, "commit", "-q", "--allow-empty", "-m", step.message or f"step {n}")
    return repo


# -- scripted histories --------------------------------------------------------

SINGLE = [Commit("alice", 0, {"x.py": lines("a", 10)})]

TWO_DEV = [
    Commit("alice", 0, {"x.py": lines("a", 10)}),
    Commit("bob", 3, {"x.py": lines("a", 10) + lines("b", 5)}),
]

DELETED = [
    Commit("alice", 0, {"x.py": lines("a", 10), "y.py": lines("y", 4)}),
    Commit("bob", 1, {"x.py": None}),
]

RENAMED = [
    Commit("alice", 0, {"a.py": lines("a", 8)}),
    Commit("bob", 2, {}, renames={"a.py": "b.py"}),
    Commit("bob", 4, {"b.py": lines("a", 8) + lines("b", 2)}),
]

MERGED = [
    Commit("alice", 0, {"m.py": lines("a", 6)}),
    Branch("feature"),
    Checkout("feature"),
    Commit("bob", 1, {"f.py": lines("f", 4)}),
    Checkout("main"),
    Commit("alice", 2, {"m.py": lines("a", 6) + lines("c", 2)}),
    Merge("alice", 3, "feature"),
]

MIXED = [
    Commit("alice", 0, {"src/app.js": lines("app", 12), "README.md": "# demo\n", "logo.png": "\x00PNG\x00"}),
    Commit("bob", 1, {"empty.py": "", "tool.rb": lines("r", 3)}),
]

# Three developers, twelve source files, forty-ish days of history.
SYNTHETIC3 = [
    Commit("alice", 0, {
        "core/engine.py": lines("engine", 40),
        "core/state.py": lines("state", 25),
        "core/io.py": lines("io", 18),
        "core/util.py": lines("util", 10),
    }),
    Commit("bob", 2, {
        "web/server.js": lines("server", 30),
        "web/routes.js": lines("routes", 22),
        "web/views.ts": lines("views", 16),
    }),
    Commit("carol", 4, {
        "tools/build.sh": lines("build", 12),
        "tools/release.sh": lines("release", 8),
        "lib/parser.c": lines("parser", 35),
    }),
    Commit("alice", 6, {"core/engine.py": lines("engine", 40) + lines("engine", 15, 40)}),
    Commit("bob", 9, {"core/state.py": lines("state", 25) + lines("bstate", 30)}),
    Commit("carol", 11, {"web/views.ts": lines("views", 16) + lines("cviews", 20)}),
    Commit("bob", 14, {"lib/parser.c": lines("parser", 35) + lines("bparser", 6), "lib/lexer.c": lines("lexer", 14)}),
    Commit("alice", 18, {"core/util.py": lines("util", 10) + lines("autil", 4)}),
    Commit("carol", 21, {"core/io.py": lines("io", 18) + lines("cio", 25), "tools/lint.sh": lines("lint", 5)}),
    Commit("bob", 25, {"web/server.js": lines("server", 30) + lines("server", 9, 30)}),
    Commit("alice", 30, {"web/routes.js": lines("routes", 22) + lines("aroutes", 3)}),
    Commit("carol", 35, {"tools/build.sh": lines("build", 12) + lines("build", 7, 12)}),
    Commit("alice", 40, {"core/engine.py": lines("engine", 55) + lines("engine", 5, 55)}),
]

REPOS = {
    "single": SINGLE,
    "two_dev": TWO_DEV,
    "deleted": DELETED,
    "renamed": RENAMED,
    "merged": MERGED,
    "mixed": MIXED,
    "synthetic3": SYNTHETIC3,
}


def build_all(root: str | Path) -> dict[str, Path]:
    root = Path(root)
    return {name: build(root / name, steps) for name, steps in REPOS.items()}


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit("usage: repos.py OUT_DIR")
    for name, path in build_all(sys.argv[1]).items():
        print(f"{name}\t{path}")
