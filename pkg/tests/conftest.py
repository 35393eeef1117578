"""
Pytest configuration and shared fixtures for tokbench tests.
"""

import sys
import tempfile
from pathlib import Path
from typing import Any, Dict, Generator, List, Tuple

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from tokbench.components.corpus import Dataset, generate_mini_corpus, write_review_csv
from tokbench.components.lattice import DictionaryEntry, LexDictionary


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def toy_docs() -> List[List[str]]:
    """Two-document TF-IDF corpus with hand-computed goldens."""
    return [["a", "b", "a"], ["b", "c"]]


@pytest.fixture
def toy_dictionary() -> LexDictionary:
    """Small dictionary over a/b/c with costs chosen to force ties."""
    return LexDictionary(
        [DictionaryEntry("a", 1), DictionaryEntry("b", 1), DictionaryEntry("ab", 2)],
        unknown_char_cost=100,
    )


@pytest.fixture(scope="session")
def small_corpus() -> Tuple[Dataset, Dataset]:
    """Reduced synthetic corpus (400 train / 100 test)."""
    return generate_mini_corpus(400, 100, seed=7)


@pytest.fixture
def small_corpus_files(temp_dir: Path, small_corpus: Tuple[Dataset, Dataset]) -> Dict[str, Path]:
    """The reduced corpus written as train.csv / test.csv."""
    train, test = small_corpus
    paths = {"train": temp_dir / "train.csv", "test": temp_dir / "test.csv"}
    paths["train"].write_bytes(write_review_csv(train))
    paths["test"].write_bytes(write_review_csv(test))
    return paths


class MockMCP:
    """Mock MCP server for testing."""

    def __init__(self) -> None:
        self.tools: Dict[str, Any] = {}

    def tool(self) -> Any:
        def decorator(func: Any) -> Any:
            self.tools[func.__name__] = func
            return func

        return decorator


@pytest.fixture
def mock_mcp() -> MockMCP:
    """Mock MCP with every component's tools registered."""
    from tokbench.components import load_all_plugins

    mcp = MockMCP()
    for plugin in load_all_plugins():
        plugin.register_to_mcp(mcp)
    return mcp
