"""Times the pure-Python kernels against the compiled extension.

Run from the repo root:

    python3 benchmarks/bench_kernels.py

Workload sizes roughly mirror one mid-size crawl: a few thousand words of
profiled text per language sample, tens of thousands of corpus tokens, and
a few thousand snippet hashes. Reports the best of five timed repeats.
"""

from __future__ import annotations

import time
from random import Random

from prisme_forge.kernels import pykernels

try:
    from prisme_forge.kernels import _ckernels
except ImportError:
    _ckernels = None


def best_time(fn, number: int, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(number):
            fn()
        best = min(best, (time.perf_counter() - start) / number)
    return best


def build_workloads():
    rng = Random(20260816)
    vocab = ["innovation", "produit", "energie", "marche", "rapport",
             "developpement", "strategie", "conception", "recherche", "usine"]
    words = [rng.choice(vocab) for _ in range(2000)]
    tokens = [rng.choice(vocab) for _ in range(20000)]
    snippets = [
        " ".join(rng.choice(vocab) for _ in range(12)).encode("utf-8")
        for _ in range(2000)
    ]
    ranks = {gram: i for i, gram in enumerate(
        sorted(pykernels.char_ngram_counts(words, 1, 4))[:300]
    )}
    counts = pykernels.char_ngram_counts(words[:400], 1, 4)
    doc_top = sorted(counts, key=lambda g: (-counts[g], g))[:300]
    return words, tokens, snippets, ranks, doc_top


def main() -> None:
    words, tokens, snippets, ranks, doc_top = build_workloads()

    cases = [
        ("char_ngram_counts (2k words, n=1..4)",
         lambda mod: mod.char_ngram_counts(words, 1, 4), 5),
        ("rank_order_distance (300-rank profile)",
         lambda mod: mod.rank_order_distance(doc_top, ranks, 300), 20),
        ("token_ngram_counts (20k tokens, n=2..5)",
         lambda mod: mod.token_ngram_counts(tokens, 2, 5), 5),
        ("fnv1a64 (2k snippets)",
         lambda mod: [mod.fnv1a64(s) for s in snippets], 20),
    ]

    header = f"{'kernel':42} {'pure (ms)':>10} {'compiled (ms)':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, run, number in cases:
        pure = best_time(lambda: run(pykernels), number) * 1000
        if _ckernels is None:
            print(f"{label:42} {pure:10.3f} {'n/a':>14} {'n/a':>8}")
            continue
        compiled = best_time(lambda: run(_ckernels), number) * 1000
        print(f"{label:42} {pure:10.3f} {compiled:14.3f} {pure / compiled:7.1f}x")

    if _ckernels is None:
        print("\ncompiled extension not built; showing pure-Python timings only")


if __name__ == "__main__":
    main()
