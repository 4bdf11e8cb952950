"""robots.txt handling: generic user-agent Disallow prefixes only.

Crawl-delay, Allow, and Sitemap directives are ignored on purpose; the
crawler applies its own politeness delay and treats any path outside the
Disallow prefixes as fair game. A missing robots.txt (HTTP 404) means
allow-all; any other retrieval failure marks the whole domain as
uncrawlable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from urllib.parse import urlsplit

from .errors import RejectedUrl, RobotsFetchError

ROBOTS_PATH = "/robots.txt"


@dataclass(frozen=True)
class RobotsRules:
    """Disallow prefixes that apply to the generic user agent of one domain."""

    domain: str
    disallow_prefixes: tuple[str, ...] = ()
    fetched_at: float = field(default_factory=time.time)

    def __post_init__(self) -> None:
        for prefix in self.disallow_prefixes:
            if not prefix.startswith("/"):
                raise ValueError(f"disallow prefix must start with '/': {prefix!r}")


def parse_robots_txt(text: str, domain: str, fetched_at: float | None = None) -> RobotsRules:
    """Extract the ``User-agent: *`` group's Disallow prefixes from a robots.txt body."""
    prefixes: list[str] = []
    applies = False
    collecting_agents = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or ":" not in line:
            continue
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()
        if key == "user-agent":
            if not collecting_agents:
                # a User-agent line after directives starts a fresh group
                applies = False
                collecting_agents = True
            if value == "*":
                applies = True
        else:
            collecting_agents = False
            if key == "disallow" and applies and value.startswith("/"):
                prefixes.append(value)
    return RobotsRules(
        domain=domain,
        disallow_prefixes=tuple(prefixes),
        fetched_at=time.time() if fetched_at is None else fetched_at,
    )


def is_allowed_by_robots(rules: RobotsRules, url: str) -> bool:
    """True unless the url's path starts with one of the disallow prefixes.

    Raises RejectedUrl when the url cannot be parsed into a scheme and host;
    callers skip such urls rather than fetching them.
    """
    try:
        parts = urlsplit(url)
    except ValueError as exc:
        raise RejectedUrl(f"unparseable url: {url!r}") from exc
    if not parts.scheme or not parts.netloc:
        raise RejectedUrl(f"url lacks scheme or host: {url!r}")
    path = parts.path or "/"
    return not any(path.startswith(prefix) for prefix in rules.disallow_prefixes)


def fetch_robots(fetcher, root_url: str) -> RobotsRules:
    """Retrieve and parse robots.txt for the domain of ``root_url``.

    404 yields allow-all rules. Any other failure raises RobotsFetchError,
    which callers treat as "skip this domain".
    """
    parts = urlsplit(root_url)
    domain = parts.netloc.lower()
    robots_url = f"{parts.scheme}://{domain}{ROBOTS_PATH}"
    try:
        result = fetcher.fetch(robots_url)
    except Exception as exc:
        raise RobotsFetchError(f"robots.txt fetch failed for {domain}: {exc}") from exc
    if result.status == 404:
        return RobotsRules(domain=domain)
    if result.status != 200:
        raise RobotsFetchError(f"robots.txt fetch for {domain} returned {result.status}")
    return parse_robots_txt(result.text, domain)
