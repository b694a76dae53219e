"""ChatGPT shared-link mining: discovery, conversation parsing and exact-match copy statistics."""

from .conversation import CodeBlock, Conversation, Turn, count_turns, parse_share_page
from .fetch import FixturePageFetcher, HttpPageFetcher, PageResponse, fetch_conversation
from .matching import MatchReport, aggregate_copy_stats, match_lines, parse_added_lines
from .patterns import SHARE_LINK_PATTERNS, SharedLinkRecord, is_share_link, scan_for_links

__all__ = [
    "CodeBlock",
    "Conversation",
    "FixturePageFetcher",
    "HttpPageFetcher",
    "MatchReport",
    "PageResponse",
    "SHARE_LINK_PATTERNS",
    "SharedLinkRecord",
    "Turn",
    "aggregate_copy_stats",
    "count_turns",
    "fetch_conversation",
    "is_share_link",
    "match_lines",
    "parse_added_lines",
    "parse_share_page",
    "scan_for_links",
]
