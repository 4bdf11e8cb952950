"""Term-candidate derivation: n-grams, lexical filters, 3-sigma selection,
sector TF-IDF with max-normalization, top-k tables and intersections.

One company domain is one document; weighting happens within one economic
sector. tf is count over the document's total n-gram multiset size, idf is
the smoothed ln((1+N)/(1+df)) + 1, and sector weights are divided by the
sector maximum so the best term lands exactly at 1.0.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from pathlib import Path

from .kernels import token_ngram_counts

Ngram = tuple[str, ...]

DEFAULT_TARGETS_PATH = Path(__file__).parent / "data" / "targets.txt"

NGRAM_MIN = 2
NGRAM_MAX = 5


@dataclass(frozen=True)
class NgramStat:
    """One n-gram's frequency within one domain document."""

    ngram: Ngram
    freq: int
    domain: str
    sector: str

    def __post_init__(self) -> None:
        if not (2 <= len(self.ngram) <= 5):
            raise ValueError(f"ngram length must be in [2, 5]: {self.ngram!r}")
        if self.freq < 1:
            raise ValueError("freq must be >= 1")


@dataclass(frozen=True)
class TargetWordSet:
    """Tokens an n-gram must touch to stay a term candidate."""

    words: frozenset[str]


@dataclass(frozen=True)
class TermWeight:
    term: Ngram
    sector: str
    weight: float


def load_targets(path: str | Path = DEFAULT_TARGETS_PATH) -> TargetWordSet:
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            words.add(line)
    return TargetWordSet(words=frozenset(words))


def generate_ngrams(tokens: list[str], n_min: int = NGRAM_MIN, n_max: int = NGRAM_MAX) -> dict[Ngram, int]:
    """Contiguous token windows of each length in [n_min, n_max], with counts."""
    if not (2 <= n_min <= n_max):
        raise ValueError(f"need 2 <= n_min <= n_max, got [{n_min}, {n_max}]")
    return token_ngram_counts(list(tokens), n_min, n_max)


def _looks_like_url_or_email(token: str) -> bool:
    return (
        "@" in token
        or "://" in token
        or token.startswith("www.")
        or token.startswith("http")
    )


def _non_lexical(token: str) -> bool:
    return any(ch.isdigit() for ch in token) or _looks_like_url_or_email(token)


def filter_ngrams(
    stats: list[NgramStat], company_names: set[str], targets: TargetWordSet
) -> list[NgramStat]:
    """Drop company-name / url-shaped / digit-bearing n-grams; keep only
    those touching at least one target word."""
    kept = []
    for stat in stats:
        if any(token in company_names for token in stat.ngram):
            continue
        if any(_non_lexical(token) for token in stat.ngram):
            continue
        if not any(token in targets.words for token in stat.ngram):
            continue
        kept.append(stat)
    return kept


def frequency_threshold(freqs: dict[Ngram, int]) -> set[Ngram]:
    """N-grams strictly above median + 3 population standard deviations."""
    if not freqs:
        return set()
    values = list(freqs.values())
    cutoff = statistics.median(values) + 3 * statistics.pstdev(values)
    return {ngram for ngram, freq in freqs.items() if freq > cutoff}


def total_ngram_tokens(tokens: list[str], n_min: int = NGRAM_MIN, n_max: int = NGRAM_MAX) -> int:
    """Size of the document's n-gram multiset: sum of max(0, |T| - n + 1)."""
    size = len(tokens)
    return sum(max(0, size - n + 1) for n in range(n_min, n_max + 1))


def compute_tfidf(
    sector: str,
    sector_docs: dict[str, list[str]],
    selected: set[Ngram],
    n_min: int = NGRAM_MIN,
    n_max: int = NGRAM_MAX,
    normalize: bool = True,
) -> list[TermWeight]:
    """Max-normalized sector weights for the selected n-grams.

    Terms that never occur in the sector's documents are omitted, so every
    returned weight sits in (0, 1] and exactly one term reaches 1.0 short
    of exact ties. normalize=False returns the raw tf-idf sums instead.
    """
    if not sector_docs:
        return []
    doc_counts: dict[str, dict[Ngram, int]] = {}
    doc_totals: dict[str, int] = {}
    for domain, tokens in sector_docs.items():
        counts = token_ngram_counts(list(tokens), n_min, n_max)
        doc_counts[domain] = counts
        doc_totals[domain] = total_ngram_tokens(tokens, n_min, n_max)

    n_docs = len(sector_docs)
    raw: dict[Ngram, float] = {}
    for term in selected:
        df = sum(1 for counts in doc_counts.values() if term in counts)
        if df == 0:
            continue
        idf = math.log((1 + n_docs) / (1 + df)) + 1
        weight = 0.0
        for domain, counts in doc_counts.items():
            count = counts.get(term, 0)
            total = doc_totals[domain]
            if count and total:
                weight += (count / total) * idf
        if weight > 0:
            raw[term] = weight

    if not raw:
        return []
    top = max(raw.values()) if normalize else 1.0
    return [TermWeight(term=term, sector=sector, weight=weight / top) for term, weight in raw.items()]


def top_terms(weights: list[TermWeight], k: int) -> list[TermWeight]:
    """Descending weight, ties by lexicographic term, at most k entries."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return sorted(weights, key=lambda w: (-w.weight, w.term))[:k]


def quantile_filter(weights: list[TermWeight], quantile: float) -> list[TermWeight]:
    """Keep terms whose weight reaches the given quantile of the sector's weights.

    quantile 0.95 keeps roughly the top 5%. Values at the cutoff survive, so
    ties never drop a term that an equal-weight neighbour kept.
    """
    if not 0.0 <= quantile <= 1.0:
        raise ValueError("quantile must be in [0, 1]")
    if not weights or quantile == 0.0:
        return list(weights)
    values = sorted(weight.weight for weight in weights)
    cutoff = values[math.ceil(quantile * len(values)) - 1]
    return [weight for weight in weights if weight.weight >= cutoff]


def intersect_sectors(a: list[TermWeight], b: list[TermWeight]) -> list[Ngram]:
    """Terms present in both ranked lists, in list a's rank order."""
    in_b = {weight.term for weight in b}
    return [weight.term for weight in a if weight.term in in_b]
