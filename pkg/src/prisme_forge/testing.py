"""Test support: a local HTTP server with a timestamped request log.

FixtureSiteServer serves either an in-memory path->body mapping or a real
directory tree on 127.0.0.1, recording (monotonic time, path) for every
request it receives. Politeness and robots-compliance assertions read that
log instead of trusting the client.
"""

from __future__ import annotations

import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote, urlsplit

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".htm": "text/html; charset=utf-8",
    ".txt": "text/plain; charset=utf-8",
    ".pdf": "application/pdf",
}


def _content_type_for(path: str) -> str:
    suffix = "." + path.rsplit(".", 1)[-1] if "." in path else ".html"
    return _CONTENT_TYPES.get(suffix.lower(), "text/html; charset=utf-8")


class FixtureSiteServer:
    """Threaded local HTTP server over a site mapping or directory tree."""

    def __init__(self, site: dict[str, str | bytes] | str | Path, host: str = "127.0.0.1"):
        if isinstance(site, (str, Path)):
            self._root: Path | None = Path(site)
            self._site: dict[str, bytes] = {}
        else:
            self._root = None
            self._site = {
                path: body.encode("utf-8") if isinstance(body, str) else body
                for path, body in site.items()
            }
        self._host = host
        self._log_lock = threading.Lock()
        self.request_log: list[tuple[float, str]] = []
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    # -- lookup ---------------------------------------------------------

    def _body_for(self, path: str) -> bytes | None:
        path = unquote(urlsplit(path).path)
        if self._root is not None:
            relative = path.lstrip("/")
            if not relative or relative.endswith("/"):
                relative += "index.html"
            candidate = (self._root / relative).resolve()
            if not str(candidate).startswith(str(self._root.resolve())):
                return None
            if candidate.is_dir():
                candidate = candidate / "index.html"
            return candidate.read_bytes() if candidate.is_file() else None
        if path in self._site:
            return self._site[path]
        if path.endswith("/") and path + "index.html" in self._site:
            return self._site[path + "index.html"]
        if path == "/" and "/index.html" in self._site:
            return self._site["/index.html"]
        return None

    def _record(self, path: str) -> None:
        with self._log_lock:
            self.request_log.append((time.monotonic(), urlsplit(path).path))

    # -- lifecycle ------------------------------------------------------

    def start(self) -> "FixtureSiteServer":
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self) -> None:  # noqa: N802 - http.server API
                outer._record(self.path)
                body = outer._body_for(self.path)
                if body is None:
                    self.send_response(404)
                    self.send_header("Content-Length", "0")
                    self.end_headers()
                    return
                self.send_response(200)
                self.send_header("Content-Type", _content_type_for(self.path))
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args) -> None:  # silence stderr noise
                pass

        self._server = ThreadingHTTPServer((self._host, 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "FixtureSiteServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()

    # -- addressing -----------------------------------------------------

    @property
    def port(self) -> int:
        assert self._server is not None, "server not started"
        return self._server.server_address[1]

    @property
    def netloc(self) -> str:
        return f"{self._host}:{self.port}"

    @property
    def base_url(self) -> str:
        return f"http://{self.netloc}"

    # -- log helpers ----------------------------------------------------

    def logged_paths(self) -> list[str]:
        with self._log_lock:
            return [path for _, path in self.request_log]

    def inter_request_gaps(self) -> list[float]:
        with self._log_lock:
            times = [moment for moment, _ in self.request_log]
        return [b - a for a, b in zip(times, times[1:])]
