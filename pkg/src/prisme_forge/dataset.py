"""Derived ML dataset: context blocks around lexicon terms, annotated with
thematic categories, scrubbed of direct identifiers, exported as a
4-column CSV.

Two context modes exist side by side: a 5-sentence block (two before, two
after the match sentence) and a token window of ~500 tokens on each side.
Anonymization is deterministic and rule-based: emails, urls, phone-shaped
digit runs, and company-name tokens become placeholders.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

from .csvio import write_rows_atomic
from .errors import ValidationError

DATASET_HEADER = ["word_labels", "keywords", "source", "sentence_anonymized"]

MODE_SENTENCE = "sentence5"
MODE_TOKEN = "token500"

SENTENCES_BEFORE = 2
SENTENCES_AFTER = 2
TOKEN_WINDOW = 500

# tokens that end in a period without ending a sentence
ABBREVIATIONS = {
    "e.g.", "i.e.", "etc.", "cf.", "vs.", "al.", "fig.", "no.", "nr.",
    "dr.", "mr.", "mrs.", "ms.", "prof.", "st.",
    "s.a.", "s.p.a.", "inc.", "ltd.", "co.", "corp.", "gmbh.",
}

_BOUNDARY_RE = re.compile(r"[.!?](?=\s)")
_EMAIL_RE = re.compile(r"[\w.+-]+@[\w-]+(?:\.[\w-]+)+")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_PHONE_RE = re.compile(r"(?<![\w<])\+?\d[\d\s().\-]{6,}\d(?![\w>])")


@dataclass(frozen=True)
class CategoryLexicon:
    """term -> thematic category, with the declared category list."""

    mapping: dict[str, str]
    categories: tuple[str, ...]

    def category_for(self, term: str) -> str | None:
        return self.mapping.get(term)


def load_category_lexicon(path: str | Path) -> CategoryLexicon:
    """Parse a ``term,category`` CSV; every term maps to exactly one category."""
    path = Path(path)
    mapping: dict[str, str] = {}
    categories: dict[str, None] = {}
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["term", "category"]:
            raise ValidationError(f"{path}: expected header 'term,category'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ValidationError(f"{path}:{lineno}: expected 2 fields")
            term, category = row[0].strip().lower(), row[1].strip()
            if not term or not category:
                raise ValidationError(f"{path}:{lineno}: empty field")
            if term in mapping and mapping[term] != category:
                raise ValidationError(
                    f"{path}:{lineno}: term {term!r} mapped to both "
                    f"{mapping[term]!r} and {category!r}"
                )
            mapping[term] = category
            categories.setdefault(category, None)
    return CategoryLexicon(mapping=mapping, categories=tuple(categories))


@dataclass(frozen=True)
class ContextExample:
    term: str
    category: str
    block: str
    mode: str
    source: str
    offset: int  # sentence index or token offset of the match


@dataclass(frozen=True)
class DatasetRow:
    word_labels: str
    keywords: str
    source: str
    sentence_anonymized: str


def _is_abbreviation(text: str, dot_index: int) -> bool:
    """True when the period at dot_index ends an abbreviation, not a sentence."""
    start = dot_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    raw = text[start : dot_index + 1].lstrip("(\"'«“‘[")
    if raw.lower() in ABBREVIATIONS:
        return True
    # uppercase initials: "J. Smith"
    return len(raw) == 2 and raw[0].isalpha() and raw[0].isupper()


def split_sentences(text: str) -> list[str]:
    """Sentence segmentation on ./!/? followed by whitespace and an
    uppercase letter or opening quote, guarded by the abbreviation list."""
    if not text.strip():
        return []
    boundaries = []
    for match in _BOUNDARY_RE.finditer(text):
        end = match.end()
        rest = text[end:].lstrip()
        if not rest:
            continue
        head = rest[0]
        if not (head.isupper() or head in "\"'«“‘("):
            continue
        if text[match.start()] == "." and _is_abbreviation(text, match.start()):
            continue
        boundaries.append(end)
    sentences = []
    start = 0
    for boundary in boundaries:
        chunk = text[start:boundary].strip()
        if chunk:
            sentences.append(chunk)
        start = boundary
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def extract_sentence_block(
    sentences: list[str], i: int, before: int = SENTENCES_BEFORE, after: int = SENTENCES_AFTER
) -> str:
    if not 0 <= i < len(sentences):
        raise IndexError(f"sentence index {i} out of range for {len(sentences)} sentences")
    lo = max(0, i - before)
    hi = min(len(sentences) - 1, i + after)
    return " ".join(sentences[lo : hi + 1])


def extract_token_block(tokens: list[str], p: int, width: int = TOKEN_WINDOW) -> str:
    if not 0 <= p < len(tokens):
        raise IndexError(f"token position {p} out of range for {len(tokens)} tokens")
    if width < 0:
        raise ValueError("width must be >= 0")
    lo = max(0, p - width)
    hi = min(len(tokens) - 1, p + width)
    return " ".join(tokens[lo : hi + 1])


def annotate(term: str, lexicon: CategoryLexicon) -> str | None:
    """Category for a term; None tells the caller to skip it and count a warning."""
    return lexicon.category_for(term)


def anonymize(text: str, company_names: set[str]) -> str:
    """Replace emails, urls, phone-shaped digit runs, and company names with
    placeholders. Idempotent: placeholders never re-match any rule."""
    scrubbed = _EMAIL_RE.sub("<EMAIL>", text)
    scrubbed = _URL_RE.sub("<URL>", scrubbed)
    scrubbed = _PHONE_RE.sub("<PHONE>", scrubbed)
    for name in sorted(company_names, key=len, reverse=True):
        if not name.strip():
            continue
        pattern = re.compile(r"(?<!\w)" + re.escape(name) + r"(?!\w)", re.IGNORECASE)
        scrubbed = pattern.sub("<ORG>", scrubbed)
    return scrubbed


def scrub_leak(text: str) -> str | None:
    """Name of the first scrub pattern still matching, or None when clean."""
    for label, pattern in (("email", _EMAIL_RE), ("url", _URL_RE), ("phone", _PHONE_RE)):
        if pattern.search(text):
            return label
    return None


def emit_dataset(rows: list[DatasetRow], path: str | Path) -> Path:
    """Write the 4-column dataset CSV; rows sort stably by source."""
    ordered = sorted(rows, key=lambda row: row.source)
    return write_rows_atomic(
        path,
        DATASET_HEADER,
        [[r.word_labels, r.keywords, r.source, r.sentence_anonymized] for r in ordered],
    )


def parse_dataset_csv(path: str | Path) -> list[DatasetRow]:
    with Path(path).open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != DATASET_HEADER:
            raise ValidationError(f"{path}: unexpected dataset header {header!r}")
        return [DatasetRow(*row) for row in reader]


# -- block construction over corpus documents ------------------------------


def _term_sentence_indexes(sentences: list[str], term: str) -> list[int]:
    """Indexes of sentences containing the term as whole lowercase tokens."""
    term_tokens = term.split()
    hits = []
    for index, sentence in enumerate(sentences):
        tokens = _rough_tokens(sentence)
        if _contains_seq(tokens, term_tokens):
            hits.append(index)
    return hits


def _rough_tokens(text: str) -> list[str]:
    return re.findall(r"[^\W_]+(?:['’\-][^\W_]+)*", text.lower(), flags=re.UNICODE)


def _contains_seq(tokens: list[str], seq: list[str]) -> bool:
    if not seq or len(seq) > len(tokens):
        return False
    return any(
        tokens[i : i + len(seq)] == seq for i in range(len(tokens) - len(seq) + 1)
    )


def build_examples(
    doc_id: str,
    text: str,
    lexicon: CategoryLexicon,
    mode: str = MODE_SENTENCE,
    *,
    width: int = TOKEN_WINDOW,
    warnings: dict[str, int] | None = None,
) -> list[ContextExample]:
    """Locate every lexicon term in one document and cut context blocks.

    Terms absent from the lexicon cannot occur here (iteration is over the
    lexicon), but categories can be missing when the mapping was filtered;
    those terms are skipped and counted in ``warnings``.
    """
    if mode not in (MODE_SENTENCE, MODE_TOKEN):
        raise ValidationError(f"unknown mode {mode!r}")
    examples = []
    sentences = split_sentences(text) if mode == MODE_SENTENCE else []
    tokens = _rough_tokens(text) if mode == MODE_TOKEN else []
    for term in sorted(lexicon.mapping):
        category = annotate(term, lexicon)
        if category is None:
            if warnings is not None:
                warnings[term] = warnings.get(term, 0) + 1
            continue
        if mode == MODE_SENTENCE:
            for index in _term_sentence_indexes(sentences, term):
                block = extract_sentence_block(sentences, index)
                examples.append(
                    ContextExample(term, category, block, mode, doc_id, index)
                )
        else:
            term_tokens = term.split()
            size = len(term_tokens)
            for p in range(len(tokens) - size + 1):
                if tokens[p : p + size] == term_tokens:
                    block = extract_token_block(tokens, p, width)
                    examples.append(
                        ContextExample(term, category, block, mode, doc_id, p)
                    )
    examples.sort(key=lambda ex: (ex.source, ex.offset, ex.term))
    return examples


def rows_from_examples(
    examples: list[ContextExample], company_names: set[str]
) -> list[DatasetRow]:
    rows = []
    for example in examples:
        rows.append(
            DatasetRow(
                word_labels=example.category,
                keywords=example.term,
                source=example.source,
                sentence_anonymized=anonymize(example.block, company_names),
            )
        )
    return rows
