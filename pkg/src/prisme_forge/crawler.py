"""Polite breadth-first crawling of company domains.

The crawl for one domain is strictly ordered: robots rules are fetched
first, every candidate url must survive the robots check and the exclude
filters, consecutive fetches are spaced by the politeness delay, and the
walk stops at the page cap. Links are followed only within the company's
registrable domain, subdomains included.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterator, NamedTuple
from urllib.parse import urljoin, urlsplit

from .errors import ConfigurationError, FetchError, RejectedUrl, RobotsFetchError
from .fetch import PoliteFetcher
from .robots import fetch_robots, is_allowed_by_robots

logger = logging.getLogger(__name__)

DEFAULT_FILTERS_PATH = Path(__file__).parent / "data" / "url_filters.txt"

DEFAULT_REPORT_KEYWORDS = (
    "annual report",
    "annual-report",
    "rapport annuel",
    "annualreport",
)

_YEAR_RE = re.compile(r"(?<!\d)(?:199\d|20\d{2})(?!\d)")


@dataclass(frozen=True)
class CompanyEntry:
    """One registry row: company name, registrable web domain, sector label."""

    name: str
    domain: str
    sector: str

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise ValueError("company name must be non-empty")
        if not self.domain:
            raise ValueError("domain must be non-empty")
        if self.domain != self.domain.lower():
            raise ValueError(f"domain must be lowercase: {self.domain!r}")
        if "://" in self.domain or "/" in self.domain or " " in self.domain:
            raise ValueError(f"domain must carry no scheme or path: {self.domain!r}")


@dataclass
class CrawlPolicy:
    """Politeness and scope settings shared by every domain crawl."""

    per_domain_delay: float = 0.0
    max_pages_per_domain: int = 100
    min_pages_for_inclusion: int = 1000
    url_exclude_patterns: tuple[str, ...] = ()
    allowed_schemes: frozenset[str] = frozenset({"http", "https"})

    def __post_init__(self) -> None:
        if self.per_domain_delay < 0:
            raise ValueError("per_domain_delay must be >= 0")
        if self.max_pages_per_domain < 1:
            raise ValueError("max_pages_per_domain must be >= 1")
        if self.min_pages_for_inclusion < 1:
            raise ValueError("min_pages_for_inclusion must be >= 1")
        self.url_exclude_patterns = tuple(self.url_exclude_patterns)
        compiled = []
        for pattern in self.url_exclude_patterns:
            try:
                compiled.append(re.compile(pattern, re.IGNORECASE))
            except re.error as exc:
                raise ConfigurationError(f"bad url filter {pattern!r}: {exc}") from exc
        self._compiled = tuple(compiled)

    @property
    def compiled_patterns(self) -> tuple[re.Pattern[str], ...]:
        return self._compiled


def load_url_filters(path: str | Path = DEFAULT_FILTERS_PATH) -> tuple[str, ...]:
    """Read exclude patterns from a file, one regex per line, # comments."""
    patterns = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            patterns.append(line)
    return tuple(patterns)


def in_domain_scope(url: str, domain: str) -> bool:
    """True when the url's host is the domain itself or one of its subdomains."""
    host = urlsplit(url).netloc.lower()
    return host == domain or host.endswith("." + domain)


def apply_url_filters(urls: list[str], policy: CrawlPolicy, domain: str | None = None) -> list[str]:
    """Drop urls matching any exclude pattern, plus bad schemes and off-domain hosts.

    Pure and order-preserving; the output is always a subset of the input.
    """
    kept = []
    for url in urls:
        parts = urlsplit(url)
        if parts.scheme.lower() not in policy.allowed_schemes:
            continue
        if domain is not None and not in_domain_scope(url, domain):
            continue
        if any(pattern.search(url) for pattern in policy.compiled_patterns):
            continue
        kept.append(url)
    return kept


class _AnchorParser(HTMLParser):
    """Collects href attributes of <a> tags, document order, tolerant of junk."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.hrefs: list[str] = []
        self.anchor_texts: list[str] = []
        self._current: list[str] | None = None

    def handle_starttag(self, tag: str, attrs) -> None:
        if tag != "a":
            return
        for key, value in attrs:
            if key == "href" and value is not None:
                self.hrefs.append(value)
                self._flush()
                self._current = []
                break

    def handle_endtag(self, tag: str) -> None:
        if tag == "a":
            self._flush()

    def handle_data(self, data: str) -> None:
        if self._current is not None:
            self._current.append(data)

    def _flush(self) -> None:
        if self._current is not None:
            self.anchor_texts.append(" ".join("".join(self._current).split()))
            self._current = None

    def links(self) -> list[tuple[str, str]]:
        self._flush()
        texts = self.anchor_texts + [""] * (len(self.hrefs) - len(self.anchor_texts))
        return list(zip(self.hrefs, texts))


def extract_links(html: str, base_url: str) -> list[tuple[str, str]]:
    """All anchors as (absolute url, anchor text); unresolvable hrefs skipped."""
    parser = _AnchorParser()
    try:
        parser.feed(html)
        parser.close()
    except Exception:  # pragma: no cover - HTMLParser rarely raises
        pass
    resolved = []
    for href, text in parser.links():
        href = href.strip()
        if not href or href.startswith("#"):
            continue
        try:
            absolute = urljoin(base_url, href)
        except ValueError:
            continue
        absolute = absolute.split("#", 1)[0]
        if absolute:
            resolved.append((absolute, text))
    return resolved


def find_pdf_links(html: str, base_url: str) -> list[str]:
    """Absolute urls of anchors resolving to .pdf targets, deduplicated in order."""
    seen = set()
    out = []
    for url, _text in extract_links(html, base_url):
        if urlsplit(url).path.lower().endswith(".pdf") and url not in seen:
            seen.add(url)
            out.append(url)
    return out


def is_annual_report(
    url: str, anchor_text: str, keywords: tuple[str, ...] = DEFAULT_REPORT_KEYWORDS
) -> bool:
    """Heuristic: a report keyword, or the word "report" next to a plausible year."""
    haystack = f"{urlsplit(url).path} {anchor_text}".lower()
    if any(keyword in haystack for keyword in keywords):
        return True
    return "report" in haystack and _YEAR_RE.search(haystack) is not None


class CrawledPage(NamedTuple):
    url: str
    html: str


@dataclass
class CrawlStats:
    """Counters accumulated by crawl_domain for manifests and inclusion checks."""

    domain: str = ""
    pages_fetched: int = 0
    robots_denied: int = 0
    filtered: int = 0
    fetch_errors: int = 0
    robots_failed: bool = False
    pdf_links: list[tuple[str, str]] = field(default_factory=list)


def crawl_domain(
    entry: CompanyEntry,
    policy: CrawlPolicy,
    fetcher,
    *,
    seed_scheme: str = "https",
    stats: CrawlStats | None = None,
    collect_pdfs: bool = False,
) -> Iterator[CrawledPage]:
    """Breadth-first crawl of one company domain, yielding pages in fetch order.

    Page-level fetch failures are logged and skipped; a robots.txt failure
    other than 404 skips the whole domain. The fetcher is wrapped with the
    policy's politeness delay, so callers pass a raw fetcher.
    """
    if stats is None:
        stats = CrawlStats()
    stats.domain = entry.domain
    polite = PoliteFetcher(fetcher, policy.per_domain_delay)
    root = f"{seed_scheme}://{entry.domain}/"
    try:
        rules = fetch_robots(polite, root)
    except RobotsFetchError as exc:
        logger.warning("skipping domain %s: %s", entry.domain, exc)
        stats.robots_failed = True
        return

    queue = deque(apply_url_filters([root], policy, domain=entry.domain))
    seen = set(queue)
    while queue and stats.pages_fetched < policy.max_pages_per_domain:
        url = queue.popleft()
        try:
            if not is_allowed_by_robots(rules, url):
                stats.robots_denied += 1
                continue
        except RejectedUrl:
            continue
        try:
            result = polite.fetch(url)
        except FetchError as exc:
            logger.info("fetch failed, skipping %s: %s", url, exc)
            stats.fetch_errors += 1
            continue
        if not result.ok:
            stats.fetch_errors += 1
            continue
        if not result.is_html:
            continue
        stats.pages_fetched += 1
        html = result.text
        yield CrawledPage(url, html)

        links = extract_links(html, url)
        if collect_pdfs:
            for pdf_url, text in links:
                if urlsplit(pdf_url).path.lower().endswith(".pdf"):
                    stats.pdf_links.append((pdf_url, text))
        candidates = [link for link, _ in links]
        kept = apply_url_filters(candidates, policy, domain=entry.domain)
        stats.filtered += len(candidates) - len(kept)
        for link in kept:
            if link not in seen:
                seen.add(link)
                queue.append(link)


def crawl_to_pages(entry, policy, fetcher, **kwargs) -> list[CrawledPage]:
    """Eager variant of crawl_domain, mainly for tests and small fixture runs."""
    return list(crawl_domain(entry, policy, fetcher, **kwargs))
