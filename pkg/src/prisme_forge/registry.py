"""Company registry ingestion: the name,domain,sector CSV that seeds a run."""

from __future__ import annotations

import csv
from pathlib import Path

from .crawler import CompanyEntry
from .errors import ValidationError

DEFAULT_SECTORS_PATH = Path(__file__).parent / "data" / "sectors.txt"

REGISTRY_HEADER = ["name", "domain", "sector"]


def load_sectors(path: str | Path = DEFAULT_SECTORS_PATH) -> tuple[str, ...]:
    labels = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            labels.append(line)
    return tuple(labels)


def load_registry(
    path: str | Path, sectors: tuple[str, ...] | None = None
) -> list[CompanyEntry]:
    """Parse a registry CSV, validating rows and enforcing unique domains.

    When ``sectors`` is given (or the shipped default list is used), every
    row's sector must be one of the labels; pass sectors=() to skip the
    check entirely.
    """
    if sectors is None:
        sectors = load_sectors()
    path = Path(path)
    entries: list[CompanyEntry] = []
    domains_seen: set[str] = set()
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty registry") from None
        if header != REGISTRY_HEADER:
            raise ValidationError(
                f"{path}: expected header {','.join(REGISTRY_HEADER)!r}, got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            name, domain, sector = (cell.strip() for cell in row)
            domain = domain.lower()
            try:
                entry = CompanyEntry(name=name, domain=domain, sector=sector)
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
            if sectors and sector not in sectors:
                raise ValidationError(f"{path}:{lineno}: unknown sector {sector!r}")
            if domain in domains_seen:
                raise ValidationError(f"{path}:{lineno}: duplicate domain {domain!r}")
            domains_seen.add(domain)
            entries.append(entry)
    return entries


def sector_of(entries: list[CompanyEntry]) -> dict[str, str]:
    """domain -> sector lookup used when tagging crawled pages."""
    return {entry.domain: entry.sector for entry in entries}
