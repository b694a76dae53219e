"""Share-link patterns and in-text scanning."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

# Anchored validation patterns; the host dots are literal.
SHARE_LINK_PATTERNS: tuple[str, ...] = (
    r"^https://chat\.openai\.com/share/[a-zA-Z0-9-]{36}$",
    r"^https://chatgpt\.com/share/[a-zA-Z0-9-]{36}$",
)
_VALIDATORS = tuple(re.compile(p) for p in SHARE_LINK_PATTERNS)

# Same patterns for free text: the id must not run on into another id character.
_SCANNER = re.compile(r"https://(?:chat\.openai\.com|chatgpt\.com)/share/[a-zA-Z0-9-]{36}(?![a-zA-Z0-9-])")

SEARCH_KEYWORDS: tuple[str, ...] = ("https://chat.openai.com/share/", "https://chatgpt.com/share/")


@dataclass(frozen=True, order=True)
class SharedLinkRecord:
    file_path: str
    url: str
    repo_id: str = ""
    introducing_commit: str = ""

    @property
    def share_id(self) -> str:
        return self.url.rsplit("/", 1)[-1]


def is_share_link(url: str) -> bool:
    return any(v.fullmatch(url) for v in _VALIDATORS)


def find_links(text: str) -> list[str]:
    return [m.group(0) for m in _SCANNER.finditer(text)]


def scan_for_links(file_contents: Mapping[str, str], repo_id: str = "") -> list[SharedLinkRecord]:
    """Every share link occurrence, deduplicated per (file, url), in path order."""
    records = []
    for path in sorted(file_contents):
        seen: set[str] = set()
        for url in find_links(file_contents[path]):
            if url not in seen:
                seen.add(url)
                records.append(SharedLinkRecord(file_path=path, url=url, repo_id=repo_id))
    return records
