"""Rank-order character n-gram language identification.

A language profile is the top-K character n-grams (1 to 4 chars, words padded
with underscores) of a training text, ranked by frequency. Detection profiles
the input the same way and picks the language whose profile is closest under
the rank-order distance. Works offline; profiles ship with the package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .extractor import normalize_text
from .kernels import char_ngram_counts, rank_order_distance

PROFILE_SIZE = 300
NGRAM_MIN = 1
NGRAM_MAX = 4
MIN_TEXT_CHARS = 20

# Letter runs of any script; digits and underscores excluded.
_LETTER_RUN_RE = re.compile(r"[^\W\d_]+")


@dataclass(frozen=True)
class LangProfile:
    lang: str
    ngram_ranks: dict[str, int]

    def __post_init__(self) -> None:
        ranks = sorted(self.ngram_ranks.values())
        if ranks != list(range(len(ranks))):
            raise ValueError(f"profile {self.lang!r}: ranks must be 0..K-1 without gaps")


@dataclass(frozen=True)
class LangVerdict:
    lang: str
    confidence: float
    source: str = "detected"

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be within [0, 1]")


def profile_words(text: str) -> list[str]:
    """Shared normalization for training and detection: folded, lowercased letter runs."""
    return _LETTER_RUN_RE.findall(normalize_text(text).lower())


def ranked_ngrams(text: str, k: int = PROFILE_SIZE) -> list[str]:
    """Top-k character n-grams by count; ties broken by the n-gram itself."""
    counts = char_ngram_counts(profile_words(text), NGRAM_MIN, NGRAM_MAX)
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [gram for gram, _ in ordered[:k]]


def build_profile(lang: str, text: str, k: int = PROFILE_SIZE) -> LangProfile:
    grams = ranked_ngrams(text, k)
    return LangProfile(lang=lang, ngram_ranks={gram: i for i, gram in enumerate(grams)})


def write_profile(profile: LangProfile, path: str | Path) -> None:
    """Serialize as `ngram<TAB>rank` lines in rank order, UTF-8."""
    ordered = sorted(profile.ngram_ranks.items(), key=lambda item: item[1])
    lines = [f"{gram}\t{rank}" for gram, rank in ordered]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_profile(path: str | Path, lang: str | None = None) -> LangProfile:
    path = Path(path)
    ranks: dict[str, int] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            gram, rank = line.split("\t")
            ranks[gram] = int(rank)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: expected `ngram<TAB>rank`") from exc
    return LangProfile(lang=lang or path.stem, ngram_ranks=ranks)


def default_profile_dir() -> Path:
    return Path(__file__).parent / "data" / "lang_profiles"


def load_profiles(directory: str | Path | None = None) -> dict[str, LangProfile]:
    directory = Path(directory) if directory else default_profile_dir()
    profiles: dict[str, LangProfile] = {}
    for path in sorted(directory.glob("*.tsv")):
        profiles[path.stem] = read_profile(path)
    return profiles


@dataclass
class LanguageDetector:
    """Immutable bundle of profiles with rank-order distance scoring."""

    profiles: dict[str, LangProfile]
    k: int = PROFILE_SIZE
    _langs: tuple[str, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.profiles:
            raise ConfigurationError("no language profiles loaded")
        # Lexicographic order fixes tie-breaking independently of load order.
        self._langs = tuple(sorted(self.profiles))

    @classmethod
    def from_dir(cls, directory: str | Path | None = None) -> LanguageDetector:
        return cls(load_profiles(directory))

    def distances(self, text: str) -> dict[str, int]:
        doc_top = ranked_ngrams(text, self.k)
        return {
            lang: rank_order_distance(doc_top, self.profiles[lang].ngram_ranks, self.k)
            for lang in self._langs
        }

    def detect(self, text: str) -> LangVerdict:
        if len(text) < MIN_TEXT_CHARS:
            return LangVerdict("und", 0.0, "detected")
        doc_top = ranked_ngrams(text, self.k)
        if not doc_top:
            return LangVerdict("und", 0.0, "detected")
        best_lang = ""
        best = worst = -1
        for lang in self._langs:
            dist = rank_order_distance(doc_top, self.profiles[lang].ngram_ranks, self.k)
            if best < 0 or dist < best:
                best, best_lang = dist, lang
            if dist > worst:
                worst = dist
        confidence = 1.0 - best / worst if worst > 0 else 0.0
        confidence = min(1.0, max(0.0, confidence))
        return LangVerdict(best_lang, confidence, "detected")


def validate(declared: str | None, detected: LangVerdict, threshold: float = 0.5) -> str:
    """Reconcile the declared page language with the detector's verdict.

    Agreement or a missing declaration yields the detected code; on
    disagreement the detector wins only at or above the confidence threshold.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be within [0, 1]")
    declared = (declared or "").strip().lower() or None
    if declared == "und":
        declared = None
    detected_lang = detected.lang if detected.lang and detected.lang != "und" else None
    if declared is None and detected_lang is None:
        return "und"
    if declared is None:
        return detected.lang
    if detected_lang is None:
        return declared if detected.confidence < threshold else detected.lang
    if declared == detected_lang:
        return declared
    return detected.lang if detected.confidence >= threshold else declared
