"""HTML text extraction, normalization, and tokenization.

Extraction is restricted to the high-semantic tags (p, title, h1, h2);
normalization collapses whitespace and folds accented Latin letters to their
base letter, leaving non-Latin scripts untouched.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from html.parser import HTMLParser

VISIBLE_TAGS = frozenset({"p", "title", "h1", "h2"})
_SUPPRESSED_TAGS = frozenset({"script", "style"})

# Letters/digits, optionally chained by internal hyphens or apostrophes.
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*")


@dataclass
class ExtractedText:
    """Normalized page text plus its token stream and declared language."""

    text: str
    tokens: list[str]
    declared_lang: str | None = None
    token_count: int = field(init=False)

    def __post_init__(self) -> None:
        self.token_count = len(self.tokens)


class _VisibleTextParser(HTMLParser):
    """Collects the flattened text of whitelisted elements in document order."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._open: list[str] = []
        self._buf: list[str] = []
        self._suppress = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SUPPRESSED_TAGS:
            self._suppress += 1
            return
        if tag in VISIBLE_TAGS:
            # A <p> opening while a <p> is open is an implicit close.
            if tag == "p" and self._open and self._open[-1] == "p":
                self._pop()
            self._open.append(tag)

    def handle_endtag(self, tag):
        if tag in _SUPPRESSED_TAGS:
            self._suppress = max(0, self._suppress - 1)
            return
        if tag in VISIBLE_TAGS and tag in self._open:
            while self._open:
                closed = self._open[-1]
                self._pop()
                if closed == tag:
                    break

    def handle_data(self, data):
        if self._open and not self._suppress:
            self._buf.append(data)

    def close(self):
        super().close()
        while self._open:
            self._pop()

    def _pop(self) -> None:
        self._open.pop()
        if not self._open:
            text = "".join(self._buf).strip()
            self._buf = []
            if text:
                self.chunks.append(text)


class _LangAttrParser(HTMLParser):
    """Reads the lang attribute of the first <html> tag."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.lang: str | None = None
        self._seen_root = False

    def handle_starttag(self, tag, attrs):
        if tag == "html" and not self._seen_root:
            self._seen_root = True
            for name, value in attrs:
                if name == "lang" and value:
                    self.lang = value
                    break

    handle_startendtag = handle_starttag


def extract_visible_text(html: str) -> str:
    """Text content of the p/title/h1/h2 elements, one line per element."""
    parser = _VisibleTextParser()
    parser.feed(html)
    parser.close()
    return "\n".join(parser.chunks)


def detect_lang_attr(html: str) -> str | None:
    """Primary subtag of the root element's lang attribute, or None."""
    parser = _LangAttrParser()
    parser.feed(html)
    parser.close()
    if not parser.lang:
        return None
    return parser.lang.lower().split("-")[0].strip() or None


_fold_cache: dict[str, str] = {}


def _fold_char(ch: str) -> str:
    folded = _fold_cache.get(ch)
    if folded is None:
        decomp = unicodedata.normalize("NFD", ch)
        base = decomp[0]
        if base != ch and unicodedata.name(base, "").startswith("LATIN"):
            folded = "".join(c for c in decomp if not unicodedata.combining(c))
        else:
            folded = ch
        _fold_cache[ch] = folded
    return folded


def fold_accents(text: str) -> str:
    """é→e, ü→u for Latin letters; other scripts pass through unchanged."""
    text = unicodedata.normalize("NFC", text)
    return "".join(_fold_char(ch) for ch in text)


def strip_accented(text: str) -> str:
    """Alternative accent mode: drop accented Latin letters entirely."""
    text = unicodedata.normalize("NFC", text)
    out = []
    for ch in text:
        folded = _fold_char(ch)
        if folded == ch or not folded:
            out.append(ch)
    return "".join(out)


def normalize_text(raw: str, accent_mode: str = "fold") -> str:
    """Collapse all whitespace to single spaces, trim, and fold accents.

    accent_mode: "fold" (default), "strip" (drop accented letters), or
    "keep" (whitespace handling only).
    """
    text = " ".join(raw.split())
    if accent_mode == "fold":
        return fold_accents(text)
    if accent_mode == "strip":
        return strip_accented(text)
    if accent_mode == "keep":
        return text
    raise ValueError(f"unknown accent_mode: {accent_mode!r}")


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens; internal hyphens/apostrophes kept, digit-only dropped."""
    tokens = []
    for match in _TOKEN_RE.finditer(text.lower()):
        token = match.group()
        if any(c.isalpha() for c in token):
            tokens.append(token)
    return tokens


def passes_min_tokens(tokens: list[str], min_tokens: int) -> bool:
    if min_tokens < 0:
        raise ValueError("min_tokens must be >= 0")
    return len(tokens) >= min_tokens


def extract_page(html: str, accent_mode: str = "fold") -> ExtractedText:
    """Full extraction pass over one HTML page."""
    text = normalize_text(extract_visible_text(html), accent_mode=accent_mode)
    return ExtractedText(text=text, tokens=tokenize(text), declared_lang=detect_lang_attr(html))
