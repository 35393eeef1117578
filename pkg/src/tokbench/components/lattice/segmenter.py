"""
Lattice construction and minimum-cost Viterbi segmentation.

Ties between equal-cost paths are broken by (1) fewer tokens, then (2) the lexicographically
earliest sequence of span lengths read left to right, where a longer span sorts first.
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

from tokbench.components.registry import register_tokenizer
from tokbench.utils import logger, safe_write_text

from .dictionary import LexDictionary, load_dictionary


class TokenSource(Enum):
    DICTIONARY = "dictionary"
    UNKNOWN = "unknown"
    BOS = "bos"
    EOS = "eos"


@dataclass(frozen=True, eq=False)
class Node:
    start: int
    end: int
    cost: int
    source: TokenSource

    @property
    def length(self) -> int:
        return self.end - self.start


EdgeCost = Callable[[Node, Node], int]


@dataclass(frozen=True)
class Token:
    surface: str
    span: Tuple[int, int]
    source: TokenSource


class Segmentation(NamedTuple):
    tokens: List[Token]
    total_cost: int


@dataclass
class Lattice:
    text: str
    begin_nodes: List[List[Node]]
    end_nodes: List[List[Node]]
    bos: Node = field(init=False)
    eos: Node = field(init=False)

    def __post_init__(self) -> None:
        n = len(self.text)
        self.bos = Node(0, 0, 0, TokenSource.BOS)
        self.eos = Node(n, n, 0, TokenSource.EOS)

    def nodes(self) -> List[Node]:
        return [node for nodes in self.begin_nodes for node in nodes]


def build_lattice(text: str, dictionary: LexDictionary) -> Lattice:
    """
    Build the segmentation lattice of ``text``.

    Every dictionary match becomes a node. A character with no single-character entry also gets
    an unknown node at ``unknown_char_cost``, so every position is covered. A single-character
    entry always replaces the unknown node, even when it costs more.
    """
    n = len(text)
    unknown_cost = dictionary.unknown_char_cost
    begin_nodes: List[List[Node]] = [[] for _ in range(n)]
    end_nodes: List[List[Node]] = [[] for _ in range(n + 1)]

    for i in range(n):
        covered = False
        for entry in dictionary.common_prefix_search(text, i):
            node = Node(i, i + len(entry.surface), entry.cost, TokenSource.DICTIONARY)
            covered = covered or node.length == 1
            begin_nodes[i].append(node)
            end_nodes[node.end].append(node)
        if not covered:
            node = Node(i, i + 1, unknown_cost, TokenSource.UNKNOWN)
            begin_nodes[i].append(node)
            end_nodes[i + 1].append(node)

    return Lattice(text, begin_nodes, end_nodes)


class _Path(NamedTuple):
    cost: int
    count: int
    prev: Optional[Node]


def _span_lengths(best: Dict[int, _Path], node: Optional[Node]) -> List[int]:
    lengths = []
    while node is not None and node.source is not TokenSource.BOS:
        lengths.append(node.length)
        node = best[id(node)].prev
    lengths.reverse()
    return lengths


def _prefer(best: Dict[int, _Path], candidate: _Path, incumbent: Optional[_Path]) -> bool:
    if incumbent is None:
        return True
    if candidate.cost != incumbent.cost:
        return candidate.cost < incumbent.cost
    if candidate.count != incumbent.count:
        return candidate.count < incumbent.count
    # both prefixes end at the same position with the same token count
    for a, b in zip(_span_lengths(best, candidate.prev), _span_lengths(best, incumbent.prev)):
        if a != b:
            return a > b
    return False


def viterbi(lattice: Lattice, edge_cost: Optional[EdgeCost] = None) -> Tuple[List[Node], int]:
    """Minimum-cost BOS-to-EOS path; returns (nodes without sentinels, total cost)."""
    n = len(lattice.text)
    best: Dict[int, _Path] = {id(lattice.bos): _Path(0, 0, None)}

    def relax(node: Node, predecessors: List[Node]) -> None:
        chosen: Optional[_Path] = None
        for prev in predecessors:
            base = best[id(prev)]
            extra = edge_cost(prev, node) if edge_cost is not None else 0
            candidate = _Path(base.cost + extra + node.cost, base.count + 1, prev)
            if _prefer(best, candidate, chosen):
                chosen = candidate
        assert chosen is not None
        best[id(node)] = chosen

    for i in range(n):
        predecessors = lattice.end_nodes[i] if i > 0 else [lattice.bos]
        for node in lattice.begin_nodes[i]:
            relax(node, predecessors)
    relax(lattice.eos, lattice.end_nodes[n] if n > 0 else [lattice.bos])

    path: List[Node] = []
    total = best[id(lattice.eos)]
    node = total.prev
    while node is not None and node.source is not TokenSource.BOS:
        path.append(node)
        node = best[id(node)].prev
    path.reverse()
    return path, total.cost


def segment_min_cost(
    text: str, dictionary: LexDictionary, edge_cost: Optional[EdgeCost] = None
) -> Segmentation:
    """
    Segment ``text`` into the minimum-total-cost token sequence.

    Args:
        text: Unsegmented input (may be empty)
        dictionary: Surface/cost dictionary
        edge_cost: Optional connection cost between adjacent nodes (defaults to zero)

    Returns:
        Segmentation(tokens, total_cost)
    """
    if not text:
        return Segmentation([], 0)
    lattice = build_lattice(text, dictionary)
    path, total = viterbi(lattice, edge_cost)
    tokens = [
        Token(text[node.start : node.end], (node.start, node.end), node.source) for node in path
    ]
    return Segmentation(tokens, total)


def tokenize(text: str, dictionary: LexDictionary) -> List[str]:
    """Surface strings of the minimum-cost segmentation."""
    return [token.surface for token in segment_min_cost(text, dictionary).tokens]


class LatticeTokenizer:
    """Dictionary-driven word tokenizer."""

    name = "lattice"

    def __init__(self, dictionary: LexDictionary):
        self.dictionary = dictionary

    def tokenize(self, text: str) -> List[str]:
        return tokenize(text, self.dictionary)

    def save(self, path: str | Path) -> Path:
        return safe_write_text(path, self.dictionary.to_tsv())


@register_tokenizer("lattice")
def build_lattice_tokenizer(model_path: Optional[str] = None, **_: object) -> LatticeTokenizer:
    """Lattice tokenizer from a dictionary file, or the bundled demo dictionary."""
    dictionary = load_dictionary(model_path)
    logger.debug(f"Lattice tokenizer ready ({len(dictionary)} entries)")
    return LatticeTokenizer(dictionary)
