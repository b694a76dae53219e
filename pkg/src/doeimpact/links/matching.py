"""Exact line matching between generated snippets and a commit's added lines."""

from __future__ import annotations

import csv
import io
import re
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from ..errors import EmptyAfterFilter
from ..stats import QuartileSummary, quartile_summary
from .conversation import CodeBlock

MIN_SIGNIFICANT_CHARS = 2  # a matched line must hold more than one character

MATCHES_CSV_HEADER = [
    "file_path",
    "url",
    "matched_lines",
    "commit_added_lines",
    "snippet_lines",
    "copy_percentage",
    "secondary_snippet_coverage",
]


@dataclass(frozen=True)
class MatchReport:
    file_path: str
    url: str
    matched_lines: int
    commit_added_lines: int
    snippet_lines: int
    copy_percentage: float
    secondary_snippet_coverage: float
    # Exact matches discarded for being a single character or blank.
    trivial_matches: int = 0

    @property
    def pair_id(self) -> tuple[str, str]:
        return (self.file_path, self.url)

    @property
    def retained(self) -> bool:
        return self.matched_lines > 0

    def to_dict(self) -> dict[str, object]:
        return asdict(self)


def _snippet_lines(snippets: Sequence[CodeBlock | str]) -> list[str]:
    lines: list[str] = []
    for snippet in snippets:
        body = snippet.body if isinstance(snippet, CodeBlock) else snippet
        lines.extend(body.splitlines())
    return lines


def match_lines(
    snippets: Sequence[CodeBlock | str],
    added_lines: Sequence[str],
    *,
    trim: bool = True,
    file_path: str = "",
    url: str = "",
) -> MatchReport:
    """One-to-one exact matching of snippet lines against added lines.

    With equality as the only relation, a maximum one-to-one pairing is the
    multiset intersection of the two line collections.
    """
    snippet = _snippet_lines(snippets)
    norm = (lambda s: s.strip()) if trim else (lambda s: s)
    common = Counter(map(norm, snippet)) & Counter(map(norm, added_lines))
    matched = sum(n for line, n in common.items() if len(line.strip()) >= MIN_SIGNIFICANT_CHARS)
    trivial = sum(common.values()) - matched
    n_added, n_snippet = len(added_lines), len(snippet)
    return MatchReport(
        file_path=file_path,
        url=url,
        matched_lines=matched,
        commit_added_lines=n_added,
        snippet_lines=n_snippet,
        copy_percentage=matched / n_added if n_added else 0.0,
        secondary_snippet_coverage=matched / n_snippet if n_snippet else 0.0,
        trivial_matches=trivial,
    )


_HUNK = re.compile(r"^@@ -\d+(?:,(\d+))? \+\d+(?:,(\d+))? @@")


def parse_added_lines(diff_text: str) -> list[str]:
    """Added lines from a unified diff; text without any hunk header is taken verbatim.

    Hunk bodies are consumed by the line counts in their ``@@`` headers, so an
    added line that itself starts with ``++`` is not mistaken for a file header.
    """
    lines = diff_text.splitlines()
    if not any(_HUNK.match(line) for line in lines):
        return lines
    added = []
    old_left = new_left = 0
    for line in lines:
        if old_left > 0 or new_left > 0:
            if line.startswith("+"):
                added.append(line[1:])
                new_left -= 1
            elif line.startswith("-"):
                old_left -= 1
            elif line.startswith("\\"):
                pass  # "\ No newline at end of file"
            else:
                old_left -= 1
                new_left -= 1
            continue
        hunk = _HUNK.match(line)
        if hunk:
            old_left = int(hunk.group(1)) if hunk.group(1) is not None else 1
            new_left = int(hunk.group(2)) if hunk.group(2) is not None else 1
    return added


def aggregate_copy_stats(reports: Iterable[MatchReport]) -> QuartileSummary:
    kept = [r.copy_percentage for r in reports if r.retained]
    if not kept:
        raise EmptyAfterFilter("no file-link pair has a matched line longer than one character")
    return quartile_summary(kept)


def reports_to_csv(reports: Iterable[MatchReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MATCHES_CSV_HEADER)
    for r in reports:
        writer.writerow([
            r.file_path,
            r.url,
            r.matched_lines,
            r.commit_added_lines,
            r.snippet_lines,
            repr(r.copy_percentage),
            repr(r.secondary_snippet_coverage),
        ])
    return buf.getvalue()
