"""prisme-forge: build multilingual web corpora around a keyword lexicon.

Pipeline stages: company registry preparation, polite domain crawling, annual
report harvesting, corpus structuring with two-stage language identification,
sector-level terminology extraction, labeled dataset emission, and hand-off to
an external vectorizer. Every stage is a subcommand of the ``prisme-forge``
command line tool and writes deterministic artifacts.
"""

__version__ = "0.1.0"
