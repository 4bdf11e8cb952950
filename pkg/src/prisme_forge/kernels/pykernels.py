"""Pure-Python implementations of the hot text kernels.

The compiled variants in ``_ckernels`` are drop-in replacements; both sides
must return identical values for identical inputs (enforced by the kernel
parity tests).
"""

from __future__ import annotations

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


def char_ngram_counts(words: list[str], n_min: int, n_max: int) -> dict[str, int]:
    """Count character n-grams of every ``_``-padded word, n in [n_min, n_max]."""
    counts: dict[str, int] = {}
    for word in words:
        padded = "_" + word + "_"
        size = len(padded)
        top = n_max if n_max < size else size
        for n in range(n_min, top + 1):
            for i in range(size - n + 1):
                gram = padded[i : i + n]
                counts[gram] = counts.get(gram, 0) + 1
    return counts


def rank_order_distance(doc_top: list[str], profile_ranks: dict[str, int], k: int) -> int:
    """Sum of rank displacements of doc_top grams against a profile.

    doc_top is ordered by rank (index = rank); grams absent from the profile
    cost the full out-of-profile penalty ``k``.
    """
    dist = 0
    for i, gram in enumerate(doc_top):
        rank = profile_ranks.get(gram)
        if rank is None:
            dist += k
        else:
            dist += i - rank if i >= rank else rank - i
    return dist


def token_ngram_counts(tokens: list[str], n_min: int, n_max: int) -> dict[tuple[str, ...], int]:
    """Count contiguous token n-grams with multiplicities, n in [n_min, n_max]."""
    counts: dict[tuple[str, ...], int] = {}
    toks = tuple(tokens)
    size = len(toks)
    for n in range(n_min, n_max + 1):
        for i in range(size - n + 1):
            gram = toks[i : i + n]
            counts[gram] = counts.get(gram, 0) + 1
    return counts


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _U64
    return h
