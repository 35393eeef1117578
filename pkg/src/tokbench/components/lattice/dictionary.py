"""
Surface-form cost dictionary with a character trie for common-prefix lookup.

File format (UTF-8, tab-separated):

    # comment
    自転車	100
    通勤用	200
    __UNKNOWN__	10000

The optional ``__UNKNOWN__`` row sets the cost of a single character that has no entry.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

from tokbench.utils import (
    DictionaryError,
    DuplicateEntryError,
    decode_utf8,
    logger,
    safe_read_bytes,
)

UNKNOWN_KEY = "__UNKNOWN__"
DEFAULT_UNKNOWN_COST = 10000
DEMO_DICTIONARY_PATH = Path(__file__).resolve().parents[2] / "data" / "demo_dict.tsv"

# Trie leaf marker; cannot collide with a one-character key
_END = ""


@dataclass(frozen=True)
class DictionaryEntry:
    surface: str
    cost: int

    def __post_init__(self) -> None:
        if len(self.surface) < 1:
            raise ValueError("DictionaryEntry.surface must be non-empty")


class LexDictionary:
    """Immutable set of dictionary entries indexed by a nested-dict trie."""

    def __init__(
        self,
        entries: Optional[List[DictionaryEntry]] = None,
        unknown_char_cost: int = DEFAULT_UNKNOWN_COST,
    ):
        self.unknown_char_cost = unknown_char_cost
        self._entries: Dict[str, DictionaryEntry] = {}
        self._trie: Dict[str, Any] = {}
        for entry in entries or []:
            if entry.surface in self._entries:
                raise DuplicateEntryError(len(self._entries) + 1, entry.surface)
            self._insert(entry)

    def _insert(self, entry: DictionaryEntry) -> None:
        self._entries[entry.surface] = entry
        node = self._trie
        for char in entry.surface:
            node = node.setdefault(char, {})
        node[_END] = entry

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, surface: object) -> bool:
        return surface in self._entries

    def __iter__(self) -> Iterator[DictionaryEntry]:
        return iter(self._entries.values())

    def get(self, surface: str) -> Optional[DictionaryEntry]:
        return self._entries.get(surface)

    def common_prefix_search(self, text: str, start: int = 0) -> List[DictionaryEntry]:
        """
        Return every entry whose surface occurs in ``text`` beginning at ``start``.

        Results are ordered by surface length, shortest first.
        """
        matches = []
        node = self._trie
        for i in range(start, len(text)):
            child = node.get(text[i])
            if child is None:
                break
            node = child
            if _END in node:
                matches.append(node[_END])
        return matches

    def with_entry(self, surface: str, cost: int) -> "LexDictionary":
        """Copy of this dictionary with one more entry."""
        return LexDictionary([*self, DictionaryEntry(surface, cost)], self.unknown_char_cost)

    def to_tsv(self) -> str:
        lines = [f"{e.surface}\t{e.cost}" for e in self]
        lines.append(f"{UNKNOWN_KEY}\t{self.unknown_char_cost}")
        return "\n".join(lines) + "\n"


def parse_dictionary(data: bytes) -> LexDictionary:
    """
    Parse dictionary TSV bytes.

    Raises:
        DuplicateEntryError: If a surface appears twice
        DictionaryError: If a line is malformed or a cost is not an integer
    """
    text = decode_utf8(data)
    entries: List[DictionaryEntry] = []
    seen: Dict[str, int] = {}
    unknown_cost = DEFAULT_UNKNOWN_COST

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            fields = line.split()
        if len(fields) != 2 or not fields[0]:
            raise DictionaryError(line_number, f"expected 'surface<TAB>cost', got {line!r}")
        surface, raw_cost = fields
        try:
            cost = int(raw_cost.strip())
        except ValueError:
            raise DictionaryError(line_number, f"cost is not an integer: {raw_cost!r}") from None

        if surface == UNKNOWN_KEY:
            unknown_cost = cost
            continue
        if surface in seen:
            raise DuplicateEntryError(line_number, surface)
        seen[surface] = line_number
        entries.append(DictionaryEntry(surface, cost))

    return LexDictionary(entries, unknown_cost)


def load_dictionary(path: Optional[str | Path] = None) -> LexDictionary:
    """
    Load a dictionary file; the bundled demo dictionary when ``path`` is None.
    """
    source = Path(path) if path is not None else DEMO_DICTIONARY_PATH
    dictionary = parse_dictionary(safe_read_bytes(source))
    logger.info(
        f"Loaded dictionary {source.name}: {len(dictionary)} entries, "
        f"unknown cost {dictionary.unknown_char_cost}"
    )
    return dictionary
