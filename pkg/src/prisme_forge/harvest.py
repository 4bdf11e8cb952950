"""Annual-report harvesting: search queries, candidate filters, dedup.

Reports are located either through a prepared url-list CSV (offline
backend) or a pluggable HTTP search adapter, downloaded politely, turned
into text through an external converter or remote ``.txt`` sidecars, then
filtered on year and length and reduced to one report per company-year.
"""

from __future__ import annotations

import csv
import logging
import re
import shlex
import subprocess
from dataclasses import dataclass, replace
from datetime import date, datetime
from email.utils import parsedate_to_datetime
from pathlib import Path
from urllib.parse import unquote, urlsplit

from .csvio import write_rows_atomic
from .errors import ConfigurationError, FetchError, ValidationError
from . import extractor

logger = logging.getLogger(__name__)

DEFAULT_BLOCKED_HOSTS_PATH = Path(__file__).parent / "data" / "blocked_hosts.txt"

MIN_REPORT_YEAR = 2017
MIN_REPORT_TOKENS = 1000

MANIFEST_HEADER = [
    "company", "domain", "url", "year", "token_count", "status", "reason", "local_path",
]

# plausible report years; wider than the acceptance window on purpose
_YEAR_RE = re.compile(r"(?<!\d)(199\d|20[0-2]\d|203[0-5])(?!\d)")

STATUS_PENDING = "pending"
STATUS_ACCEPTED = "accepted"
STATUS_REJECTED = "rejected"


@dataclass(frozen=True)
class ReportDoc:
    """One candidate annual report and its acceptance state."""

    company: str
    domain: str
    url: str
    local_path: str = ""
    year: int | None = None
    token_count: int = 0
    published_date: date | None = None
    status: str = STATUS_PENDING
    reason: str = ""


def build_search_query(company: str, domain: str) -> str:
    if not company or not domain:
        raise ValueError("company and domain must be non-empty")
    return f'{company} intext:"Annual Report" AND inurl:{domain}'


def load_blocked_hosts(path: str | Path = DEFAULT_BLOCKED_HOSTS_PATH) -> tuple[str, ...]:
    hosts = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            hosts.append(line)
    return tuple(hosts)


def filter_candidate_url(url: str, blocked_hosts: tuple[str, ...] | None = None) -> str | None:
    """Rejection reason for a candidate url, or None when it is acceptable.

    Non-.pdf targets (the word-processing formats in particular) are
    "format" rejections; social/commercial platform hosts are "host".
    """
    if blocked_hosts is None:
        blocked_hosts = load_blocked_hosts()
    parts = urlsplit(url)
    if not parts.path.lower().endswith(".pdf"):
        return "format"
    host = parts.netloc.lower().rsplit("@", 1)[-1].split(":", 1)[0]
    for blocked in blocked_hosts:
        if host == blocked or host.endswith("." + blocked):
            return "host"
    return None


def extract_report_year(filename: str, first_page_text: str) -> int | None:
    """Largest plausible year in the filename, else the most frequent one in
    the first-page text (ties resolved toward the more recent year)."""
    in_name = [int(match) for match in _YEAR_RE.findall(filename)]
    if in_name:
        return max(in_name)
    counts: dict[int, int] = {}
    for match in _YEAR_RE.findall(first_page_text):
        year = int(match)
        counts[year] = counts.get(year, 0) + 1
    if not counts:
        return None
    return max(counts, key=lambda year: (counts[year], year))


def apply_report_filters(
    doc: ReportDoc, min_year: int = MIN_REPORT_YEAR, min_tokens: int = MIN_REPORT_TOKENS
) -> ReportDoc:
    if doc.year is None or doc.year < min_year:
        return replace(doc, status=STATUS_REJECTED, reason="year")
    if doc.token_count < min_tokens:
        return replace(doc, status=STATUS_REJECTED, reason="too_short")
    return replace(doc, status=STATUS_ACCEPTED, reason="")


def dedupe_reports(docs: list[ReportDoc]) -> list[ReportDoc]:
    """One report per (company, year): latest published_date, ties to the
    lexicographically smallest url; output sorted by (company, year)."""
    best: dict[tuple[str, int | None], ReportDoc] = {}
    for doc in docs:
        key = (doc.company, doc.year)
        current = best.get(key)
        if current is None:
            best[key] = doc
            continue
        doc_date = doc.published_date or date.min
        cur_date = current.published_date or date.min
        if doc_date > cur_date or (doc_date == cur_date and doc.url < current.url):
            best[key] = doc
    return sorted(best.values(), key=lambda d: (d.company, d.year if d.year is not None else -1))


# -- search backends ------------------------------------------------------


class UrlListBackend:
    """Offline backend: candidate urls from a prepared CSV ``company,url``."""

    def __init__(self, path: str | Path):
        self.by_company: dict[str, list[str]] = {}
        path = Path(path)
        with path.open(encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != ["company", "url"]:
                raise ValidationError(f"{path}: expected header 'company,url'")
            for row in reader:
                if len(row) != 2:
                    continue
                company, url = row[0].strip(), row[1].strip()
                if company and url:
                    self.by_company.setdefault(company, []).append(url)

    def candidate_urls(self, company: str, domain: str) -> list[str]:
        return list(self.by_company.get(company, ()))


class SearchApiBackend:
    """Generic HTTP search adapter: GET an endpoint template, one url per line.

    The endpoint must contain a ``{query}`` placeholder; the response body is
    treated as a newline-separated url list. Real search APIs are adapted by
    pointing the template at a thin proxy that emits this shape.
    """

    def __init__(self, endpoint_template: str, fetcher):
        if "{query}" not in endpoint_template:
            raise ConfigurationError("search endpoint template needs a {query} placeholder")
        self.endpoint_template = endpoint_template
        self.fetcher = fetcher

    def candidate_urls(self, company: str, domain: str) -> list[str]:
        from urllib.parse import quote

        query = build_search_query(company, domain)
        url = self.endpoint_template.format(query=quote(query, safe=""))
        result = self.fetcher.fetch(url)
        if not result.ok:
            logger.warning("search failed for %s: HTTP %s", company, result.status)
            return []
        return [line.strip() for line in result.text.splitlines() if line.strip()]


# -- text extraction ------------------------------------------------------


class SubprocessConverter:
    """Runs an external PDF-to-text command: ``cmd <pdf-path>`` on stdout."""

    def __init__(self, command: str):
        self.argv = shlex.split(command)
        if not self.argv:
            raise ConfigurationError("empty converter command")

    def text_for(self, url: str, local_pdf: Path, fetcher) -> str:
        try:
            proc = subprocess.run(
                self.argv + [str(local_pdf)],
                capture_output=True, check=True, timeout=120,
            )
        except (OSError, subprocess.SubprocessError) as exc:
            logger.warning("converter failed for %s: %s", local_pdf, exc)
            return ""
        return proc.stdout.decode("utf-8", errors="replace")


class SidecarTextReader:
    """Reads pre-extracted text from the ``.txt`` twin of the report url."""

    def text_for(self, url: str, local_pdf: Path, fetcher) -> str:
        sidecar_url = re.sub(r"\.pdf$", ".txt", url, flags=re.IGNORECASE)
        if sidecar_url == url:
            return ""
        try:
            result = fetcher.fetch(sidecar_url)
        except FetchError:
            return ""
        return result.text if result.ok else ""


def first_page(text: str, fallback_chars: int = 2000) -> str:
    """Text up to the first form-feed, the page break emitted by converters."""
    head, sep, _ = text.partition("\f")
    return head if sep else text[:fallback_chars]


def published_date_of(result, local_path: Path | None) -> date | None:
    """Last-Modified header, else file mtime, else None."""
    header = result.headers.get("last-modified") if result is not None else None
    if header:
        try:
            return parsedate_to_datetime(header).date()
        except (TypeError, ValueError):
            pass
    if local_path is not None and local_path.exists():
        return datetime.fromtimestamp(local_path.stat().st_mtime).date()
    return None


def filename_of(url: str) -> str:
    return unquote(urlsplit(url).path.rsplit("/", 1)[-1])


def harvest_reports(
    entries,
    backend,
    fetcher,
    out_dir: str | Path,
    *,
    min_year: int = MIN_REPORT_YEAR,
    min_tokens: int = MIN_REPORT_TOKENS,
    blocked_hosts: tuple[str, ...] | None = None,
    converter=None,
    accent_mode: str = "fold",
) -> list[ReportDoc]:
    """Run the full harvest for a registry: locate, download, filter, dedupe.

    Returns every candidate doc (accepted, rejected, and duplicates demoted
    to rejected(duplicate)), sorted like the manifest.
    """
    if blocked_hosts is None:
        blocked_hosts = load_blocked_hosts()
    reader = converter if converter is not None else SidecarTextReader()
    out_dir = Path(out_dir)
    pdf_dir = out_dir / "pdfs"
    docs: list[ReportDoc] = []
    for entry in entries:
        for url in backend.candidate_urls(entry.name, entry.domain):
            doc = ReportDoc(company=entry.name, domain=entry.domain, url=url)
            reason = filter_candidate_url(url, blocked_hosts)
            if reason is not None:
                docs.append(replace(doc, status=STATUS_REJECTED, reason=reason))
                continue
            try:
                result = fetcher.fetch(url)
            except FetchError as exc:
                logger.info("download failed for %s: %s", url, exc)
                docs.append(replace(doc, status=STATUS_REJECTED, reason="fetch"))
                continue
            if not result.ok:
                docs.append(replace(doc, status=STATUS_REJECTED, reason="fetch"))
                continue
            filename = filename_of(url) or "report.pdf"
            local_path = pdf_dir / entry.domain / filename
            local_path.parent.mkdir(parents=True, exist_ok=True)
            local_path.write_bytes(result.body)
            text = reader.text_for(url, local_path, fetcher)
            normalized = extractor.normalize_text(text, accent_mode=accent_mode)
            tokens = extractor.tokenize(normalized)
            doc = replace(
                doc,
                local_path=str(local_path),
                year=extract_report_year(filename, first_page(text)),
                token_count=len(tokens),
                published_date=published_date_of(result, local_path),
            )
            docs.append(apply_report_filters(doc, min_year=min_year, min_tokens=min_tokens))

    accepted = [doc for doc in docs if doc.status == STATUS_ACCEPTED]
    kept = dedupe_reports(accepted)
    kept_ids = {id(doc) for doc in kept}
    final: list[ReportDoc] = []
    for doc in docs:
        if doc.status == STATUS_ACCEPTED and id(doc) not in kept_ids:
            doc = replace(doc, status=STATUS_REJECTED, reason="duplicate")
        final.append(doc)
    final.sort(key=lambda d: (d.company, d.year if d.year is not None else -1, d.url))
    return final


def write_harvest_manifest(
    docs: list[ReportDoc], path: str | Path, base: str | Path | None = None
) -> Path:
    """Write the manifest CSV; with base given, local paths are relativized
    so the file is byte-identical wherever the run directory lives."""

    def portable(local_path: str) -> str:
        if base and local_path:
            try:
                return Path(local_path).relative_to(Path(base)).as_posix()
            except ValueError:
                pass
        return local_path

    rows = [
        [
            doc.company,
            doc.domain,
            doc.url,
            "" if doc.year is None else str(doc.year),
            str(doc.token_count),
            doc.status,
            doc.reason,
            portable(doc.local_path),
        ]
        for doc in docs
    ]
    return write_rows_atomic(path, MANIFEST_HEADER, rows)
