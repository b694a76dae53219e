"""Share-page fetching: live HTTP with per-host rate limiting, or recorded fixtures."""

from __future__ import annotations

import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol
from urllib.parse import urlsplit

import httpx

from ..errors import DoeImpactError, LinkDisabled, NetworkError
from .conversation import Conversation, parse_share_page

logger = logging.getLogger(__name__)

DISABLED_STATUSES = frozenset({403, 404, 410})
USER_AGENT = "doeimpact-link-miner/0.1"


@dataclass(frozen=True)
class PageResponse:
    url: str
    status: int
    text: str


class PageFetcher(Protocol):
    def fetch(self, url: str) -> PageResponse: ...


class HttpPageFetcher:
    """Synchronous fetcher safe to share between threads.

    Requests to the same host are spaced at least ``min_interval`` seconds
    apart; 429 responses are retried honouring ``Retry-After``.
    """

    def __init__(
        self,
        timeout: float = 30.0,
        min_interval: float = 1.0,
        max_retries: int = 3,
        client: httpx.Client | None = None,
    ) -> None:
        self._client = client or httpx.Client(
            timeout=timeout, follow_redirects=True, headers={"User-Agent": USER_AGENT}
        )
        self._min_interval = min_interval
        self._max_retries = max_retries
        self._lock = threading.Lock()
        self._next_slot: dict[str, float] = {}

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> HttpPageFetcher:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def _wait_for_host(self, host: str) -> None:
        with self._lock:
            now = time.monotonic()
            slot = max(now, self._next_slot.get(host, now))
            self._next_slot[host] = slot + self._min_interval
        if slot > now:
            time.sleep(slot - now)

    def fetch(self, url: str) -> PageResponse:
        host = urlsplit(url).netloc
        for attempt in range(self._max_retries + 1):
            self._wait_for_host(host)
            try:
                resp = self._client.get(url)
            except httpx.HTTPError as exc:
                raise NetworkError(f"{url}: {exc}") from exc
            if resp.status_code != 429:
                return PageResponse(url=url, status=resp.status_code, text=resp.text)
            if attempt < self._max_retries:
                delay = float(resp.headers.get("Retry-After", 2**attempt))
                logger.warning("rate limited on %s, retrying in %.1fs", host, delay)
                time.sleep(delay)
        raise NetworkError(f"{url}: still rate limited after {self._max_retries} retries")


class FixturePageFetcher:
    """Serve recorded ``page.html`` files.

    A fixture directory is matched by its ``meta.json`` ``url`` field or, failing
    that, by its name being the share id. ``meta.json`` may carry
    ``http_status`` for recorded error responses.
    """

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self._by_url: dict[str, Path] = {}
        for meta_file in sorted(self.root.glob("*/meta.json")):
            meta = json.loads(meta_file.read_text(encoding="utf-8"))
            if "url" in meta:
                self._by_url.setdefault(meta["url"], meta_file.parent)

    def _locate(self, url: str) -> Path | None:
        if url in self._by_url:
            return self._by_url[url]
        candidate = self.root / url.rstrip("/").rsplit("/", 1)[-1]
        return candidate if candidate.is_dir() else None

    def fetch(self, url: str) -> PageResponse:
        directory = self._locate(url)
        if directory is None or not (directory / "page.html").exists():
            return PageResponse(url=url, status=404, text="")
        status = 200
        meta_file = directory / "meta.json"
        if meta_file.exists():
            status = int(json.loads(meta_file.read_text(encoding="utf-8")).get("http_status", 200))
        return PageResponse(url=url, status=status, text=(directory / "page.html").read_text(encoding="utf-8"))


def fetch_conversation(url: str, fetcher: PageFetcher) -> Conversation:
    response = fetcher.fetch(url)
    if response.status in DISABLED_STATUSES:
        raise LinkDisabled(f"{url}: HTTP {response.status}")
    if response.status >= 400:
        raise NetworkError(f"{url}: HTTP {response.status}")
    return parse_share_page(response.text)


def fetch_many(
    urls: Iterable[str], fetcher: PageFetcher, parallelism: int = 4
) -> dict[str, Conversation | DoeImpactError]:
    """Fetch distinct urls with bounded concurrency; failures are returned, not raised."""

    def one(url: str) -> Conversation | DoeImpactError:
        try:
            return fetch_conversation(url, fetcher)
        except DoeImpactError as exc:
            return exc

    unique = sorted(set(urls))
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        return dict(zip(unique, pool.map(one, unique)))
