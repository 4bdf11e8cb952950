#!/usr/bin/env python3
"""Rebuild the shipped language profiles from the training corpus.

Usage: python3 tools/build_lang_profiles.py [--corpus DIR] [--out DIR] [--k N]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from prisme_forge.langid import PROFILE_SIZE, build_profile, write_profile

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", type=Path, default=ROOT / "tools" / "langid_corpus")
    parser.add_argument(
        "--out", type=Path, default=ROOT / "src" / "prisme_forge" / "data" / "lang_profiles"
    )
    parser.add_argument("--k", type=int, default=PROFILE_SIZE)
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    for path in sorted(args.corpus.glob("*.txt")):
        profile = build_profile(path.stem, path.read_text(encoding="utf-8"), k=args.k)
        out_path = args.out / f"{path.stem}.tsv"
        write_profile(profile, out_path)
        print(f"{path.stem}: {len(profile.ngram_ranks)} n-grams -> {out_path}")


if __name__ == "__main__":
    main()
