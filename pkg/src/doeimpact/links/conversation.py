"""Shared conversation model and share-page parsing.

Two page layouts are understood:

* a JSON payload in ``<script id="__NEXT_DATA__">`` whose server response holds
  either a ``linear_conversation`` list or a ``mapping`` tree walked back from
  ``current_node``;
* rendered markup where each message element carries
  ``data-message-author-role`` and generated code sits in ``<pre>`` blocks.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Any, Iterable

from ..errors import LinkDisabled, NoCodeSnippets, ParseError

DISABLED_MARKERS = (
    "shared link has been disabled",
    "this shared link has been deleted",
    "conversation not found",
    "this conversation is no longer accessible",
)

VOID_ELEMENTS = frozenset({"area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "source", "track", "wbr"})

_FENCE = re.compile(r"^[ \t]*(```+|~~~+)[ \t]*([^\n`]*)\n(.*?)^[ \t]*\1[ \t]*$", re.MULTILINE | re.DOTALL)


@dataclass(frozen=True)
class CodeBlock:
    language: str | None
    body: str

    @property
    def lines(self) -> list[str]:
        return self.body.splitlines()


@dataclass
class Turn:
    prompt: str
    response: str = ""
    code_blocks: list[CodeBlock] = field(default_factory=list)


@dataclass
class Conversation:
    turns: list[Turn]
    title: str = ""

    @property
    def code_blocks(self) -> list[CodeBlock]:
        return [block for turn in self.turns for block in turn.code_blocks]

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "turns": [
                {
                    "prompt": t.prompt,
                    "response": t.response,
                    "code_blocks": [{"language": b.language, "body": b.body} for b in t.code_blocks],
                }
                for t in self.turns
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Conversation:
        return cls(
            title=data.get("title", ""),
            turns=[
                Turn(
                    prompt=t["prompt"],
                    response=t["response"],
                    code_blocks=[CodeBlock(b.get("language"), b["body"]) for b in t["code_blocks"]],
                )
                for t in data["turns"]
            ],
        )


def count_turns(conversation: Conversation) -> int:
    if not conversation.turns:
        raise ValueError("conversation has no turns")
    return len(conversation.turns)


def extract_code_blocks(markdown: str) -> list[CodeBlock]:
    blocks = []
    for match in _FENCE.finditer(markdown):
        info = match.group(2).strip()
        blocks.append(CodeBlock(language=info.split()[0] if info else None, body=match.group(3).rstrip("\n")))
    return blocks


def build_turns(messages: Iterable[tuple[str, str, list[CodeBlock]]]) -> list[Turn]:
    """Group (role, text, code) messages into prompt/response turns."""
    turns: list[Turn] = []
    for role, text, code in messages:
        if role == "user":
            turns.append(Turn(prompt=text))
        elif role == "assistant":
            if not turns:
                turns.append(Turn(prompt=""))
            turn = turns[-1]
            turn.response = f"{turn.response}\n\n{text}" if turn.response else text
            turn.code_blocks.extend(code)
    return turns


# -- JSON payload ----------------------------------------------------------


def _message_from_payload(message: dict[str, Any]) -> tuple[str, str, list[CodeBlock]] | None:
    role = (message.get("author") or {}).get("role")
    content = message.get("content") or {}
    kind = content.get("content_type", "text")
    if kind == "code":
        body = content.get("text", "")
        return role, body, [CodeBlock(content.get("language") or None, body)]
    parts = content.get("parts") or []
    text = "\n".join(p for p in parts if isinstance(p, str))
    if kind != "text" and not text:
        return None
    return role, text, extract_code_blocks(text) if role == "assistant" else []


def _payload_messages(data: dict[str, Any]) -> list[dict[str, Any]]:
    if "linear_conversation" in data:
        return [node["message"] for node in data["linear_conversation"] if node.get("message")]
    mapping = data.get("mapping")
    if isinstance(mapping, dict):
        node_id = data.get("current_node")
        chain = []
        while node_id:
            node = mapping.get(node_id)
            if node is None:
                raise ParseError(f"mapping references missing node {node_id}")
            if node.get("message"):
                chain.append(node["message"])
            node_id = node.get("parent")
        return chain[::-1]
    raise ParseError("conversation payload has neither linear_conversation nor mapping")


class _NextDataExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.payload: str | None = None
        self._capturing = False
        self._buf: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag == "script" and dict(attrs).get("id") == "__NEXT_DATA__":
            self._capturing = True

    def handle_endtag(self, tag: str) -> None:
        if tag == "script" and self._capturing:
            self._capturing = False
            self.payload = "".join(self._buf)

    def handle_data(self, data: str) -> None:
        if self._capturing:
            self._buf.append(data)


def _parse_next_data(html: str) -> Conversation | None:
    extractor = _NextDataExtractor()
    extractor.feed(html)
    if extractor.payload is None:
        return None
    try:
        doc = json.loads(extractor.payload)
    except json.JSONDecodeError as exc:
        raise ParseError(f"__NEXT_DATA__ is not valid JSON: {exc}") from exc
    props = doc.get("props", {}).get("pageProps", {})
    response = props.get("serverResponse")
    if not response or response.get("type") == "error" or "data" not in response:
        raise LinkDisabled("share page carries no conversation")
    data = response["data"]
    messages = [m for m in map(_message_from_payload, _payload_messages(data)) if m is not None]
    return Conversation(turns=build_turns(messages), title=data.get("title", ""))


# -- rendered markup -------------------------------------------------------


class _MarkupExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.messages: list[tuple[str, str, list[CodeBlock]]] = []
        self._role: str | None = None
        self._depth = 0
        self._text: list[str] = []
        self._code: list[CodeBlock] = []
        self._pre_depth = 0
        self._code_depth = 0
        self._code_lang: str | None = None
        # Whole <pre> text, and the text of its <code> child; toolbars inside
        # <pre> (language label, copy button) only end up in the former.
        self._pre_buf: list[str] = []
        self._code_buf: list[str] | None = None

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        attributes = dict(attrs)
        if self._role is None:
            role = attributes.get("data-message-author-role")
            if role:
                self._role, self._depth = role, 1
                self._text, self._code = [], []
            return
        if tag in VOID_ELEMENTS:
            if tag == "br":
                self.handle_data("\n")
            return
        self._depth += 1
        if tag == "pre":
            self._pre_depth = self._depth
            self._code_lang, self._pre_buf, self._code_buf = None, [], None
        elif tag == "code" and self._pre_depth and not self._code_depth:
            self._code_depth = self._depth
            self._code_buf = []
            for cls in (attributes.get("class") or "").split():
                if cls.startswith("language-"):
                    self._code_lang = cls[len("language-"):]

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if self._role is not None and tag == "br":
            self.handle_data("\n")

    def handle_endtag(self, tag: str) -> None:
        if self._role is None or tag in VOID_ELEMENTS:
            return
        if self._code_depth and self._depth == self._code_depth:
            self._code_depth = 0
        if self._pre_depth and self._depth == self._pre_depth:
            body = "".join(self._pre_buf if self._code_buf is None else self._code_buf)
            self._code.append(CodeBlock(self._code_lang, body.rstrip("\n")))
            self._pre_depth = 0
        self._depth -= 1
        if self._depth == 0:
            self.messages.append((self._role, "".join(self._text).strip(), self._code))
            self._role = None

    def handle_data(self, data: str) -> None:
        if self._role is None:
            return
        self._text.append(data)
        if self._pre_depth:
            self._pre_buf.append(data)
            if self._code_depth and self._code_buf is not None:
                self._code_buf.append(data)


def _parse_markup(html: str) -> Conversation | None:
    extractor = _MarkupExtractor()
    extractor.feed(html)
    extractor.close()
    if not extractor.messages:
        return None
    return Conversation(turns=build_turns(extractor.messages))


def parse_share_page(html: str, require_code: bool = True) -> Conversation:
    conversation = _parse_next_data(html) or _parse_markup(html)
    if conversation is None or not conversation.turns:
        lowered = html.lower()
        if any(marker in lowered for marker in DISABLED_MARKERS):
            raise LinkDisabled("share page reports the link as disabled")
        raise ParseError("unrecognized share page layout")
    if require_code and not conversation.code_blocks:
        raise NoCodeSnippets("conversation contains no code snippets")
    return conversation
