"""Corpus records: keyword matching, context snippets, dedup, CSV export.

Keyword variants are matched as whole tokens; a multi-word variant must
appear as consecutive tokens. Counting is non-overlapping left-to-right,
so counts stay auditable by a brute-force rescan. Snippets are hashed with
64-bit FNV-1a over their whitespace-normalized lowercase text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import extractor
from .csvio import write_rows_atomic, write_text_atomic
from .errors import ValidationError
from .kernels import fnv1a64

DEFAULT_LEXICON_PATH = Path(__file__).parent / "data" / "keywords.tsv"

DEFAULT_SNIPPET_WINDOW = 50

CORPUS_HEADER = [
    "domain", "url", "lang", "sector", "token_count",
    "date_seen", "keyword", "count", "snippet_hash", "snippet",
]


@dataclass(frozen=True)
class KeywordLexicon:
    """lang -> lemma -> surface variants, as shipped or user-supplied."""

    table: dict[str, dict[str, tuple[str, ...]]]

    def languages(self) -> tuple[str, ...]:
        return tuple(sorted(self.table))

    def lemmas(self, lang: str) -> tuple[str, ...]:
        return tuple(self.table.get(lang, {}))

    def all_lemmas(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for lang in sorted(self.table):
            for lemma in self.table[lang]:
                seen.setdefault(lemma, None)
        return tuple(seen)


def load_lexicon(path: str | Path = DEFAULT_LEXICON_PATH) -> KeywordLexicon:
    """Parse a lexicon file: lines of ``lang<TAB>lemma<TAB>v1,v2,...``."""
    path = Path(path)
    table: dict[str, dict[str, tuple[str, ...]]] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) != 3:
            raise ValidationError(f"{path}:{lineno}: expected lang<TAB>lemma<TAB>variants")
        lang, lemma, variants_field = (part.strip() for part in parts)
        variants = tuple(v.strip() for v in variants_field.split(",") if v.strip())
        if not lang or not lemma or not variants:
            raise ValidationError(f"{path}:{lineno}: empty field")
        table.setdefault(lang, {})[lemma] = variants
    return KeywordLexicon(table=table)


def expand_variants(lexicon: KeywordLexicon, lang: str) -> dict[str, frozenset[str]]:
    """Variant table for one language; unknown languages fall back to the
    lemma strings themselves (union over all configured languages)."""
    entry = lexicon.table.get(lang)
    if entry is not None:
        return {lemma: frozenset(variants) for lemma, variants in entry.items()}
    return {lemma: frozenset({lemma}) for lemma in lexicon.all_lemmas()}


def fold_variant_table(
    variants: dict[str, frozenset[str]], accent_mode: str = "fold"
) -> dict[str, frozenset[str]]:
    """Normalize lemmas and variants the way page tokens are normalized, so
    accented lexicon entries match accent-folded corpus text."""
    folded: dict[str, set[str]] = {}
    for lemma, forms in variants.items():
        lemma_n = extractor.normalize_text(lemma, accent_mode=accent_mode).lower()
        bucket = folded.setdefault(lemma_n, set())
        for form in forms:
            bucket.add(extractor.normalize_text(form, accent_mode=accent_mode).lower())
    return {lemma: frozenset(forms) for lemma, forms in folded.items()}


def _variant_token_seqs(forms: frozenset[str]) -> list[tuple[str, ...]]:
    # longest sequences first so left-to-right matching prefers them
    seqs = {tuple(form.split()) for form in forms if form}
    return sorted(seqs, key=lambda seq: (-len(seq), seq))


def _match_at(tokens: list[str], i: int, seq: tuple[str, ...]) -> bool:
    if i + len(seq) > len(tokens):
        return False
    return all(tokens[i + j] == part for j, part in enumerate(seq))


def contains_any(tokens: list[str], lexicon_entry: frozenset[str] | set[str]) -> bool:
    """True iff any variant occurs as a whole token (or consecutive tokens)."""
    for seq in _variant_token_seqs(frozenset(lexicon_entry)):
        if len(seq) == 1:
            if seq[0] in tokens:
                return True
        else:
            for i in range(len(tokens) - len(seq) + 1):
                if _match_at(tokens, i, seq):
                    return True
    return False


def match_spans(tokens: list[str], forms: frozenset[str]) -> list[tuple[int, int]]:
    """Non-overlapping left-to-right [start, end) spans of one lemma's variants."""
    seqs = _variant_token_seqs(forms)
    spans: list[tuple[int, int]] = []
    i = 0
    size = len(tokens)
    while i < size:
        for seq in seqs:
            if _match_at(tokens, i, seq):
                spans.append((i, i + len(seq)))
                i += len(seq)
                break
        else:
            i += 1
    return spans


def count_occurrences(tokens: list[str], variants: dict[str, frozenset[str]]) -> dict[str, int]:
    """Occurrences per lemma; lemmas with zero matches are omitted."""
    counts: dict[str, int] = {}
    for lemma in sorted(variants):
        spans = match_spans(tokens, variants[lemma])
        if spans:
            counts[lemma] = len(spans)
    return counts


def extract_context_snippets(
    tokens: list[str],
    variants: dict[str, frozenset[str]],
    window_tokens: int = DEFAULT_SNIPPET_WINDOW,
) -> list[str]:
    """Detokenized windows around every keyword match, in document order.

    Overlapping windows of the same lemma merge into one snippet; windows
    of different lemmas stay separate records even when they overlap.
    """
    if window_tokens < 0:
        raise ValueError("window_tokens must be >= 0")
    snippets = [snippet for _lemma, _span, snippet in snippets_by_lemma(tokens, variants, window_tokens)]
    return snippets


def snippets_by_lemma(
    tokens: list[str],
    variants: dict[str, frozenset[str]],
    window_tokens: int = DEFAULT_SNIPPET_WINDOW,
) -> list[tuple[str, tuple[int, int], str]]:
    """(lemma, merged inclusive span, snippet) triples in document order."""
    size = len(tokens)
    merged: list[tuple[int, int, str]] = []
    for lemma in sorted(variants):
        windows = []
        for start, end in match_spans(tokens, variants[lemma]):
            lo = max(0, start - window_tokens)
            hi = min(size - 1, end - 1 + window_tokens)
            windows.append((lo, hi))
        # merge within this lemma only
        folded: list[list[int]] = []
        for lo, hi in windows:
            if folded and lo <= folded[-1][1] + 1:
                folded[-1][1] = max(folded[-1][1], hi)
            else:
                folded.append([lo, hi])
        for lo, hi in folded:
            merged.append((lo, hi, lemma))
    merged.sort(key=lambda item: (item[0], item[1], item[2]))
    return [
        (lemma, (lo, hi), " ".join(tokens[lo : hi + 1]))
        for lo, hi, lemma in merged
    ]


def snippet_hash(snippet: str) -> int:
    """FNV-1a 64 over the whitespace-normalized lowercase snippet."""
    normalized = " ".join(snippet.split()).lower()
    return fnv1a64(normalized.encode("utf-8"))


@dataclass(frozen=True)
class SnippetRecord:
    """One keyword-anchored snippet with its page metadata."""

    domain: str
    url: str
    lang: str
    sector: str
    token_count: int
    date_seen: str
    keyword: str
    counts: dict[str, int] = field(default_factory=dict)
    snippet: str = ""

    def __post_init__(self) -> None:
        if not self.snippet:
            raise ValueError("snippet must be non-empty")
        if self.counts.get(self.keyword, 0) < 1:
            raise ValueError(f"keyword {self.keyword!r} must have a count >= 1")

    @property
    def count(self) -> int:
        return self.counts[self.keyword]

    @property
    def snippet_hash(self) -> int:
        return snippet_hash(self.snippet)


def deduplicate_snippets(snippets: list[str]) -> list[str]:
    """First snippet kept per content hash, order preserved."""
    seen: set[int] = set()
    out = []
    for snippet in snippets:
        digest = snippet_hash(snippet)
        if digest not in seen:
            seen.add(digest)
            out.append(snippet)
    return out


def deduplicate_records(records: list[SnippetRecord]) -> list[SnippetRecord]:
    """Unique on (domain, url, snippet_hash), first occurrence kept."""
    seen: set[tuple[str, str, int]] = set()
    out = []
    for record in records:
        key = (record.domain, record.url, record.snippet_hash)
        if key not in seen:
            seen.add(key)
            out.append(record)
    return out


def aggregate_results_to_csv(records: list[SnippetRecord], path: str | Path) -> Path:
    """Write the corpus CSV sorted by (domain, url, snippet_hash)."""
    ordered = sorted(records, key=lambda r: (r.domain, r.url, r.snippet_hash))
    rows = [
        [
            r.domain, r.url, r.lang, r.sector, str(r.token_count),
            r.date_seen, r.keyword, str(r.count), str(r.snippet_hash), r.snippet,
        ]
        for r in ordered
    ]
    return write_rows_atomic(path, CORPUS_HEADER, rows)


def parse_corpus_csv(path: str | Path) -> list[SnippetRecord]:
    """Rebuild records from a corpus CSV (counts carry the keyword only)."""
    import csv as _csv

    records = []
    with Path(path).open(encoding="utf-8", newline="") as handle:
        reader = _csv.reader(handle)
        header = next(reader, None)
        if header != CORPUS_HEADER:
            raise ValidationError(f"{path}: unexpected corpus header {header!r}")
        for row in reader:
            (domain, url, lang, sector, token_count,
             date_seen, keyword, count, _digest, snippet) = row
            records.append(
                SnippetRecord(
                    domain=domain, url=url, lang=lang, sector=sector,
                    token_count=int(token_count), date_seen=date_seen,
                    keyword=keyword, counts={keyword: int(count)}, snippet=snippet,
                )
            )
    return records


def export_plain_text(records: list[SnippetRecord], out_dir: str | Path) -> list[Path]:
    """One text file per domain, one snippet per line, corpus CSV order."""
    ordered = sorted(records, key=lambda r: (r.domain, r.url, r.snippet_hash))
    by_domain: dict[str, list[str]] = {}
    for record in ordered:
        by_domain.setdefault(record.domain, []).append(record.snippet)
    out_dir = Path(out_dir)
    written = []
    for domain in sorted(by_domain):
        target = out_dir / f"{domain}.txt"
        write_text_atomic(target, "\n".join(by_domain[domain]) + "\n")
        written.append(target)
    return written
