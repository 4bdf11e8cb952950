"""Page fetchers behind one tiny interface: ``fetch(url) -> FetchResult``.

Three implementations cover every pipeline context:

* HttpFetcher      - urllib-based network fetcher for real crawls.
* DirectoryFetcher - serves a local directory tree as one or more fake
                     domains; used by offline runs and most tests.
* PoliteFetcher    - wraps any fetcher and enforces a minimum delay
                     between consecutive requests to the same host while
                     letting distinct hosts proceed concurrently.
"""

from __future__ import annotations

import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import unquote, urlsplit

from .errors import FetchError

DEFAULT_USER_AGENT = "prisme-forge/0.1 (corpus research crawler)"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".htm": "text/html; charset=utf-8",
    ".txt": "text/plain; charset=utf-8",
    ".pdf": "application/pdf",
    ".csv": "text/csv; charset=utf-8",
}


@dataclass(frozen=True)
class FetchResult:
    url: str
    status: int
    body: bytes = b""
    headers: dict[str, str] = field(default_factory=dict)  # keys lowercased

    @property
    def text(self) -> str:
        return self.body.decode("utf-8", errors="replace")

    @property
    def is_html(self) -> bool:
        return "html" in self.headers.get("content-type", "")

    @property
    def ok(self) -> bool:
        return 200 <= self.status < 300


class HttpFetcher:
    """Plain urllib GET with a timeout; HTTP errors become status codes."""

    def __init__(self, user_agent: str = DEFAULT_USER_AGENT, timeout: float = 20.0):
        self.user_agent = user_agent
        self.timeout = timeout

    def fetch(self, url: str) -> FetchResult:
        request = urllib.request.Request(url, headers={"User-Agent": self.user_agent})
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                headers = {k.lower(): v for k, v in response.headers.items()}
                return FetchResult(url, response.status, response.read(), headers)
        except urllib.error.HTTPError as exc:
            headers = {k.lower(): v for k, v in (exc.headers or {}).items()}
            return FetchResult(url, exc.code, b"", headers)
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise FetchError(f"fetch failed for {url}: {exc}") from exc


class DirectoryFetcher:
    """Maps hosts to directory roots and serves files as HTTP-like results.

    A url path resolves to a file under the host's root; "/" and paths
    ending in "/" fall back to index.html. Unknown hosts and missing files
    return 404. Paths may not escape the root.
    """

    def __init__(self, roots: dict[str, Path] | Path, domain: str = "fixture.test"):
        if isinstance(roots, (str, Path)):
            roots = {domain: Path(roots)}
        self.roots = {host.lower(): Path(root) for host, root in roots.items()}

    def _resolve(self, host: str, path: str) -> Path | None:
        root = self.roots.get(host)
        if root is None:
            return None
        relative = unquote(path).lstrip("/")
        if not relative or relative.endswith("/"):
            relative += "index.html"
        candidate = (root / relative).resolve()
        if not str(candidate).startswith(str(root.resolve())):
            return None  # traversal attempt
        if candidate.is_dir():
            candidate = candidate / "index.html"
        return candidate if candidate.is_file() else None

    def fetch(self, url: str) -> FetchResult:
        parts = urlsplit(url)
        candidate = self._resolve(parts.netloc.lower(), parts.path)
        if candidate is None:
            return FetchResult(url, 404)
        content_type = _CONTENT_TYPES.get(candidate.suffix.lower(), "text/html; charset=utf-8")
        headers = {"content-type": content_type}
        mtime = candidate.stat().st_mtime
        headers["last-modified"] = time.strftime(
            "%a, %d %b %Y %H:%M:%S GMT", time.gmtime(mtime)
        )
        return FetchResult(url, 200, candidate.read_bytes(), headers)


class PoliteFetcher:
    """Serializes requests per host and spaces them at least ``delay`` apart.

    The gap is measured from the completion of one request to the start of
    the next, so arrival times observed by the server are always separated
    by at least the configured delay. Distinct hosts are independent.
    """

    def __init__(self, inner, delay: float = 0.0):
        if delay < 0:
            raise ValueError("delay must be >= 0")
        self._inner = inner
        self._delay = delay
        self._registry_lock = threading.Lock()
        self._host_locks: dict[str, threading.Lock] = {}
        self._last_done: dict[str, float] = {}

    def _lock_for(self, host: str) -> threading.Lock:
        with self._registry_lock:
            lock = self._host_locks.get(host)
            if lock is None:
                lock = self._host_locks[host] = threading.Lock()
            return lock

    def fetch(self, url: str) -> FetchResult:
        host = urlsplit(url).netloc.lower()
        with self._lock_for(host):
            last = self._last_done.get(host)
            if last is not None:
                wait = last + self._delay - time.monotonic()
                if wait > 0:
                    time.sleep(wait)
            try:
                return self._inner.fetch(url)
            finally:
                self._last_done[host] = time.monotonic()
