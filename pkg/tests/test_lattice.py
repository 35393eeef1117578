"""
Tests for the dictionary trie and minimum-cost lattice segmentation.
"""

import random
from typing import Dict, List, Tuple

import pytest

from tokbench.components.lattice import (
    DictionaryEntry,
    LexDictionary,
    TokenSource,
    build_lattice,
    load_dictionary,
    parse_dictionary,
    segment_min_cost,
    tokenize,
)
from tokbench.components.registry import get_tokenizer_factory
from tokbench.utils import ConfigError, DictionaryError, DuplicateEntryError


def _brute_force_min_cost(text: str, dictionary: LexDictionary) -> int:
    """Minimum total cost over every segmentation, by enumerating all cut sets."""
    n = len(text)
    best = None
    for mask in range(1 << max(0, n - 1)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        total = 0
        for start, end in zip(cuts, cuts[1:]):
            piece = text[start:end]
            entry = dictionary.get(piece)
            if entry is not None:
                total += entry.cost
            elif end - start == 1:
                total += dictionary.unknown_char_cost
            else:
                break
        else:
            best = total if best is None else min(best, total)
    assert best is not None
    return best


def _random_dictionary(rng: random.Random, alphabet: str) -> LexDictionary:
    surfaces: Dict[str, int] = {}
    for _ in range(rng.randint(0, 12)):
        length = rng.randint(1, 4)
        surfaces["".join(rng.choice(alphabet) for _ in range(length))] = rng.randint(1, 60)
    entries = [DictionaryEntry(s, c) for s, c in surfaces.items()]
    return LexDictionary(entries, unknown_char_cost=rng.randint(10, 100))


class TestDictionary:
    """Tests for dictionary parsing and lookup."""

    def test_parse(self):
        data = "# comment\n\n自転車\t300\n通勤\t350\n__UNKNOWN__\t5000\n".encode("utf-8")
        dictionary = parse_dictionary(data)
        assert len(dictionary) == 2
        assert dictionary.get("自転車").cost == 300
        assert dictionary.unknown_char_cost == 5000

    def test_duplicate_entry(self):
        with pytest.raises(DuplicateEntryError) as exc_info:
            parse_dictionary("a\t1\nb\t2\na\t3\n".encode("utf-8"))
        assert exc_info.value.line_number == 3
        assert exc_info.value.surface == "a"

    @pytest.mark.parametrize("line", ["a", "a\tx", "a\t1\t2"])
    def test_malformed_line(self, line):
        with pytest.raises(DictionaryError):
            parse_dictionary(line.encode("utf-8"))

    def test_common_prefix_search_shortest_first(self, toy_dictionary):
        matches = toy_dictionary.common_prefix_search("abc", 0)
        assert [m.surface for m in matches] == ["a", "ab"]
        assert toy_dictionary.common_prefix_search("abc", 2) == []

    def test_demo_dictionary_loads(self):
        dictionary = load_dictionary()
        assert "自転車" in dictionary
        assert dictionary.unknown_char_cost == 10000

    def test_tsv_round_trip(self, toy_dictionary):
        reparsed = parse_dictionary(toy_dictionary.to_tsv().encode("utf-8"))
        assert sorted((e.surface, e.cost) for e in reparsed) == sorted(
            (e.surface, e.cost) for e in toy_dictionary
        )
        assert reparsed.unknown_char_cost == toy_dictionary.unknown_char_cost


class TestSegmentation:
    """Tests for segment_min_cost and tokenize."""

    def test_demo_golden(self):
        tokens = tokenize("自転車通勤用に購入。", load_dictionary())
        assert tokens == ["自転車", "通勤用", "に", "購入", "。"]

    def test_empty_text(self, toy_dictionary):
        assert segment_min_cost("", toy_dictionary) == ([], 0)

    def test_all_unknown(self):
        segmentation = segment_min_cost("xyz", LexDictionary([], unknown_char_cost=7))
        assert [t.surface for t in segmentation.tokens] == ["x", "y", "z"]
        assert all(t.source is TokenSource.UNKNOWN for t in segmentation.tokens)
        assert segmentation.total_cost == 21

    def test_fewer_tokens_win_ties(self, toy_dictionary):
        # "ab" costs 2 either way
        segmentation = segment_min_cost("ab", toy_dictionary)
        assert [t.surface for t in segmentation.tokens] == ["ab"]
        assert segmentation.total_cost == 2

    def test_longer_first_span_wins_ties(self):
        dictionary = LexDictionary(
            [DictionaryEntry(s, 1) for s in ("a", "c", "ab", "bc")], unknown_char_cost=100
        )
        assert tokenize("abc", dictionary) == ["ab", "c"]

    def test_spans_cover_text(self):
        segmentation = segment_min_cost("自転車通勤用に購入。", load_dictionary())
        spans = [t.span for t in segmentation.tokens]
        assert spans[0][0] == 0
        assert spans[-1][1] == len("自転車通勤用に購入。")
        assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))

    def test_edge_cost_hook(self, toy_dictionary):
        def penalize_long(left, right):
            return 100 if right.length == 2 else 0

        segmentation = segment_min_cost("ab", toy_dictionary, edge_cost=penalize_long)
        assert [t.surface for t in segmentation.tokens] == ["a", "b"]
        assert segmentation.total_cost == 2

    def test_lattice_has_unknown_fallback(self, toy_dictionary):
        lattice = build_lattice("abz", toy_dictionary)
        sources = {(n.start, n.end): n.source for n in lattice.nodes()}
        assert sources[(2, 3)] is TokenSource.UNKNOWN
        # single-char entries replace the unknown node
        assert sources[(0, 1)] is TokenSource.DICTIONARY

    def test_single_char_entry_replaces_unknown_even_when_costlier(self):
        dictionary = LexDictionary([DictionaryEntry("a", 20)], unknown_char_cost=10)
        segmentation = segment_min_cost("ab", dictionary)
        assert [(t.surface, t.source) for t in segmentation.tokens] == [
            ("a", TokenSource.DICTIONARY),
            ("b", TokenSource.UNKNOWN),
        ]
        assert segmentation.total_cost == 30
        lattice = build_lattice("a", dictionary)
        assert [(n.cost, n.source) for n in lattice.nodes()] == [(20, TokenSource.DICTIONARY)]

    def test_adding_multi_char_entry_never_raises_cost(self):
        rng = random.Random(11)
        for _ in range(200):
            dictionary = _random_dictionary(rng, "ab")
            text = "".join(rng.choice("ab") for _ in range(rng.randint(1, 9)))
            before = segment_min_cost(text, dictionary).total_cost
            surface = "".join(rng.choice("ab") for _ in range(rng.randint(2, 3)))
            if surface in dictionary:
                continue
            after = segment_min_cost(text, dictionary.with_entry(surface, rng.randint(1, 200)))
            assert after.total_cost <= before

    @pytest.mark.slow
    def test_matches_brute_force(self):
        rng = random.Random(2020)
        for _ in range(1000):
            dictionary = _random_dictionary(rng, "abc")
            text = "".join(rng.choice("abc") for _ in range(rng.randint(1, 12)))
            expected = _brute_force_min_cost(text, dictionary)
            assert segment_min_cost(text, dictionary).total_cost == expected, text

    @pytest.mark.slow
    def test_concatenation_fuzz(self):
        rng = random.Random(99)
        dictionary = load_dictionary()
        alphabet = "自転車通勤用に購入。良いですがxyz \\n"
        for _ in range(10_000):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 20)))
            assert "".join(tokenize(text, dictionary)) == text


class TestLatticeTokenizer:
    """Tests for the registered lattice tokenizer."""

    def test_factory_uses_demo_dictionary(self):
        tokenizer = get_tokenizer_factory("lattice")()
        assert tokenizer.tokenize("購入。") == ["購入", "。"]

    def test_save_and_reload(self, temp_dir, toy_dictionary):
        from tokbench.components.lattice import LatticeTokenizer

        path = LatticeTokenizer(toy_dictionary).save(temp_dir / "dict.tsv")
        reloaded = get_tokenizer_factory("lattice")(model_path=str(path))
        assert reloaded.tokenize("abab") == ["ab", "ab"]

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            get_tokenizer_factory("mecab")


def _pairs(tokens: List[str]) -> List[Tuple[int, int]]:
    spans, start = [], 0
    for token in tokens:
        spans.append((start, start + len(token)))
        start += len(token)
    return spans


def test_token_spans_match_surfaces():
    dictionary = load_dictionary()
    text = "とても良い自転車です。"
    segmentation = segment_min_cost(text, dictionary)
    surfaces = [t.surface for t in segmentation.tokens]
    assert [t.span for t in segmentation.tokens] == _pairs(surfaces)
