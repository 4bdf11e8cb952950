"""Parity between the compiled kernels and the pure-Python fallback.

Every function must agree bit for bit on every input; the compiled side is
an optimization, never a semantic fork. Skipped when only one side exists.
"""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prisme_forge import kernels
from prisme_forge.kernels import pykernels

compiled = pytest.importorskip(
    "prisme_forge.kernels._ckernels", reason="compiled kernels not built"
)

words = st.lists(
    st.text(alphabet=st.sampled_from("abcéде"), min_size=1, max_size=8), max_size=12,
)
tokens = st.lists(st.sampled_from(["alpha", "beta", "gamma", "delta"]), max_size=40)


class TestParity:
    @given(words, st.integers(1, 3), st.integers(3, 5))
    @settings(max_examples=150, deadline=None)
    def test_char_ngram_counts(self, ws, n_min, n_max):
        assert compiled.char_ngram_counts(ws, n_min, n_max) == (
            pykernels.char_ngram_counts(ws, n_min, n_max)
        )

    @given(
        st.lists(st.text(alphabet="abc_", min_size=1, max_size=4), max_size=20),
        st.dictionaries(st.text(alphabet="abc_", min_size=1, max_size=4),
                        st.integers(0, 50), max_size=20),
        st.integers(1, 300),
    )
    @settings(max_examples=150, deadline=None)
    def test_rank_order_distance(self, doc, ranks, k):
        assert compiled.rank_order_distance(doc, ranks, k) == (
            pykernels.rank_order_distance(doc, ranks, k)
        )

    @given(tokens, st.integers(2, 3), st.integers(3, 5))
    @settings(max_examples=150, deadline=None)
    def test_token_ngram_counts(self, toks, n_min, n_max):
        assert compiled.token_ngram_counts(toks, n_min, n_max) == (
            pykernels.token_ngram_counts(toks, n_min, n_max)
        )

    @given(st.binary(max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_fnv1a64(self, data):
        assert compiled.fnv1a64(data) == pykernels.fnv1a64(data)


class TestFixedVectors:
    """Anchors shared by both sides, independent of hypothesis exploration."""

    CASES = [
        (b"", 0xCBF29CE484222325),
        (b"a", 0xAF63DC4C8601EC8C),
        (b"foobar", 0x85944171F73967E8),
    ]

    @pytest.mark.parametrize("data,expected", CASES)
    def test_fnv_reference_values_compiled(self, data, expected):
        assert compiled.fnv1a64(data) == expected

    @pytest.mark.parametrize("data,expected", CASES)
    def test_fnv_reference_values_pure(self, data, expected):
        assert pykernels.fnv1a64(data) == expected

    def test_char_ngram_example_both_sides(self):
        expected = {
            "_": 2, "a": 1, "b": 1,
            "_a": 1, "ab": 1, "b_": 1,
            "_ab": 1, "ab_": 1, "_ab_": 1,
        }
        assert compiled.char_ngram_counts(["ab"], 1, 4) == expected
        assert pykernels.char_ngram_counts(["ab"], 1, 4) == expected

    def test_distance_example_both_sides(self):
        doc = ["x", "a", "b"]
        ranks = {"a": 0, "b": 1, "c": 2}
        assert compiled.rank_order_distance(doc, ranks, 3) == 5
        assert pykernels.rank_order_distance(doc, ranks, 3) == 5


class TestSelection:
    def test_active_implementation_reported(self):
        assert kernels.IMPLEMENTATION in ("compiled", "pure-python")
        assert kernels.COMPILED == (kernels.IMPLEMENTATION == "compiled")

    def test_exported_callables_come_from_active_side(self):
        source = compiled if kernels.COMPILED else pykernels
        assert kernels.fnv1a64 is source.fnv1a64
        assert kernels.char_ngram_counts is source.char_ngram_counts
