# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled text kernels; behaviour-identical to ``pykernels``."""

from cpython.dict cimport PyDict_GetItem
from cpython.unicode cimport PyUnicode_Substring


def char_ngram_counts(list words, int n_min, int n_max):
    """Count character n-grams of every ``_``-padded word, n in [n_min, n_max]."""
    cdef dict counts = {}
    cdef int size, n, i, top
    cdef str word, padded, gram
    for word in words:
        padded = "_" + word + "_"
        size = len(padded)
        top = n_max if n_max < size else size
        for n in range(n_min, top + 1):
            for i in range(size - n + 1):
                gram = PyUnicode_Substring(padded, i, i + n)
                if gram in counts:
                    counts[gram] = <long> counts[gram] + 1
                else:
                    counts[gram] = 1
    return counts


def rank_order_distance(list doc_top, dict profile_ranks, long k):
    """Sum of rank displacements of doc_top grams against a profile."""
    cdef long dist = 0
    cdef long i = 0
    cdef long rank
    cdef str gram
    cdef object entry
    for gram in doc_top:
        entry = <object> profile_ranks.get(gram, None)
        if entry is None:
            dist += k
        else:
            rank = <long> entry
            dist += i - rank if i >= rank else rank - i
        i += 1
    return dist


def token_ngram_counts(list tokens, int n_min, int n_max):
    """Count contiguous token n-grams with multiplicities, n in [n_min, n_max]."""
    cdef dict counts = {}
    cdef tuple toks = tuple(tokens)
    cdef int size = len(toks)
    cdef int n, i
    cdef tuple gram
    for n in range(n_min, n_max + 1):
        for i in range(size - n + 1):
            gram = toks[i : i + n]
            if gram in counts:
                counts[gram] = <long> counts[gram] + 1
            else:
                counts[gram] = 1
    return counts


def fnv1a64(bytes data):
    """64-bit FNV-1a hash of a byte string."""
    cdef unsigned long long h = 0xCBF29CE484222325ULL
    cdef unsigned long long prime = 0x100000001B3ULL
    cdef unsigned char b
    for b in data:
        h = (h ^ b) * prime
    return h
