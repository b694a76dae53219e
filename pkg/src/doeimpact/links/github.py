"""Minimal GitHub code-search client used to find candidate files.

Needs a token (``GITHUB_TOKEN``); responses are cached on disk as JSON so a
crawl can be resumed without spending quota again.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import os
import time
from pathlib import Path
from typing import Any, Iterator

import httpx

from ..errors import NetworkError
from .patterns import SEARCH_KEYWORDS

logger = logging.getLogger(__name__)

API_URL = "https://api.github.com"
SEARCH_LANGUAGES = ("JavaScript", "Python", "Java", "TypeScript", "C#", "C++", "PHP", "Shell", "C", "Ruby")


def search_query(keyword: str, language: str) -> str:
    return f'"{keyword}" language:{language}'


class GitHubCodeSearch:
    def __init__(
        self,
        token: str | None = None,
        cache_dir: str | Path | None = None,
        client: httpx.Client | None = None,
        per_page: int = 100,
    ) -> None:
        token = token or os.environ.get("GITHUB_TOKEN")
        if not token:
            raise ValueError("GitHub code search requires a token (set GITHUB_TOKEN)")
        headers = {"Accept": "application/vnd.github+json", "Authorization": f"Bearer {token}"}
        self._client = client or httpx.Client(base_url=API_URL, timeout=30.0)
        self._client.headers.update(headers)
        self._cache = Path(cache_dir) if cache_dir else None
        self.per_page = per_page

    def close(self) -> None:
        self._client.close()

    def _cache_path(self, key: str) -> Path | None:
        if self._cache is None:
            return None
        return self._cache / (hashlib.sha256(key.encode()).hexdigest()[:32] + ".json")

    def _respect_rate_limit(self, resp: httpx.Response) -> None:
        remaining = resp.headers.get("X-RateLimit-Remaining")
        if remaining is not None and int(remaining) == 0:
            reset = int(resp.headers.get("X-RateLimit-Reset", "0"))
            wait = max(0.0, reset - time.time())
            logger.warning("GitHub rate limit exhausted, sleeping %.0fs", wait)
            time.sleep(wait)

    def _get_json(self, url: str, params: dict[str, Any] | None = None) -> Any:
        key = url + "?" + json.dumps(params or {}, sort_keys=True)
        cached = self._cache_path(key)
        if cached is not None and cached.exists():
            return json.loads(cached.read_text(encoding="utf-8"))
        for attempt in range(4):
            try:
                resp = self._client.get(url, params=params)
            except httpx.HTTPError as exc:
                raise NetworkError(str(exc)) from exc
            if resp.status_code in (403, 429) and resp.headers.get("X-RateLimit-Remaining") == "0":
                self._respect_rate_limit(resp)
                continue
            if resp.status_code >= 400:
                raise NetworkError(f"GET {url}: HTTP {resp.status_code}")
            self._respect_rate_limit(resp)
            data = resp.json()
            if cached is not None:
                cached.parent.mkdir(parents=True, exist_ok=True)
                cached.write_text(json.dumps(data, sort_keys=True), encoding="utf-8")
            return data
        raise NetworkError(f"GET {url}: rate limited")

    def search(self, keyword: str, language: str, max_pages: int = 10) -> Iterator[dict[str, Any]]:
        """Yield code-search items for one keyword/language pair."""
        for page in range(1, max_pages + 1):
            params = {"q": search_query(keyword, language), "per_page": self.per_page, "page": page}
            data = self._get_json("/search/code", params)
            items = data.get("items", [])
            yield from items
            if len(items) < self.per_page:
                break

    def search_all(self, languages=SEARCH_LANGUAGES, keywords=SEARCH_KEYWORDS) -> Iterator[dict[str, Any]]:
        seen: set[tuple[str, str]] = set()
        for keyword in keywords:
            for language in languages:
                for item in self.search(keyword, language):
                    key = (item["repository"]["full_name"], item["path"])
                    if key not in seen:
                        seen.add(key)
                        yield item

    def file_text(self, item: dict[str, Any]) -> str:
        """Decoded content of a search hit (contents API)."""
        data = self._get_json(item["url"])
        if data.get("encoding") == "base64":
            return base64.b64decode(data["content"]).decode("utf-8", "replace")
        return data.get("content", "")
