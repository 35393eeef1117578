"""
Tests for TF-IDF fitting, transformation and the model file format.
"""

import math

import numpy as np
import pytest
from scipy import sparse

from tokbench.components.vectorize import (
    fit,
    fit_transform,
    fit_transform_timed,
    format_matrix,
    load_tfidf_model,
    parse_tfidf,
    save_tfidf_model,
    smooth_idf,
    transform,
)
from tokbench.utils import ModelFormatError, ValidationError

IDF_RARE = math.log(1.5) + 1.0


class WhitespaceTokenizer:
    name = "whitespace"

    def tokenize(self, text):
        return text.split()


class TestFit:
    """Tests for vocabulary and idf fitting."""

    def test_idf_golden(self, toy_docs):
        model = fit(toy_docs)
        assert model.vocabulary.tokens() == ["a", "b", "c"]
        assert model.vocabulary.df == {"a": 1, "b": 2, "c": 1}
        assert model.idf_of("a") == pytest.approx(1.4054651, abs=1e-7)
        assert model.idf_of("a") == pytest.approx(IDF_RARE, abs=1e-15)
        assert model.idf_of("b") == pytest.approx(1.0, abs=1e-15)
        assert model.n_docs == 2

    def test_single_document(self):
        model = fit([["x", "y", "x"]])
        assert np.allclose(model.idf, 1.0)

    def test_lexicographic_columns(self):
        model = fit([["猫", "b", "a"], ["B"]])
        assert model.vocabulary.tokens() == sorted(["猫", "b", "a", "B"])
        assert [model.vocabulary.index[t] for t in model.vocabulary.tokens()] == [0, 1, 2, 3]

    def test_smooth_idf_never_below_one(self):
        idf = smooth_idf(np.array([1, 5, 10]), 10)
        assert np.all(idf >= 1.0)
        assert idf[-1] == pytest.approx(1.0)

    def test_zero_documents(self):
        with pytest.raises(ValidationError):
            fit([])


class TestTransform:
    """Tests for TF-IDF vectors."""

    def test_row_goldens(self, toy_docs):
        model, matrix = fit_transform(toy_docs)
        assert isinstance(matrix, sparse.csr_matrix)
        assert matrix.shape == (2, 3)
        dense = matrix.toarray()
        assert dense[0] == pytest.approx([0.9421556, 0.3351758, 0.0], abs=1e-7)
        assert dense[1] == pytest.approx([0.0, 0.5797386, 0.8148025], abs=1e-7)

    def test_rows_are_unit_or_zero(self, toy_docs):
        model = fit(toy_docs)
        matrix = transform(model, [["a"], ["c", "c", "b"], [], ["zzz"]])
        norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
        assert norms[:2] == pytest.approx([1.0, 1.0], abs=1e-12)
        assert norms[2:].tolist() == [0.0, 0.0]

    def test_unseen_tokens_ignored(self, toy_docs):
        model = fit(toy_docs)
        matrix = transform(model, [["q", "r"]])
        assert matrix.nnz == 0
        assert matrix.shape == (1, 3)

    def test_empty_document_in_fit(self):
        model, matrix = fit_transform([["a"], []])
        assert matrix.shape == (2, 1)
        assert matrix[1].nnz == 0
        assert model.idf_of("a") == pytest.approx(IDF_RARE)

    def test_sorted_indices(self):
        model, matrix = fit_transform([["c", "a", "b", "a"]])
        assert matrix.indices.tolist() == [0, 1, 2]
        assert matrix.has_sorted_indices


class TestTimedFit:
    """Tests for fit_transform_timed."""

    def test_elapsed_recorded(self):
        result = fit_transform_timed(WhitespaceTokenizer(), ["a b a", "b c"])
        assert result.elapsed_seconds > 0.0
        assert result.matrix.shape == (2, 3)
        assert result.model.vocabulary.tokens() == ["a", "b", "c"]

    def test_empty_texts(self):
        with pytest.raises(ValidationError):
            fit_transform_timed(WhitespaceTokenizer(), [])


class TestSerialization:
    """Tests for the TF-IDF model file."""

    def test_save_load(self, temp_dir, toy_docs):
        model = fit(toy_docs)
        path = save_tfidf_model(model, temp_dir / "tfidf.tsv")
        text = path.read_text(encoding="utf-8")
        assert text.splitlines()[0] == "#tfidf v1 n_docs=2"
        assert text.splitlines()[2] == "b\t1\t2\t1"

        loaded = load_tfidf_model(path)
        assert loaded.vocabulary == model.vocabulary
        assert loaded.idf.tolist() == model.idf.tolist()
        assert (transform(loaded, toy_docs) != transform(model, toy_docs)).nnz == 0

    def test_tokens_with_control_characters(self, temp_dir):
        model = fit([["a\tb", "c\\n", "\n"]])
        loaded = load_tfidf_model(save_tfidf_model(model, temp_dir / "tfidf.tsv"))
        assert loaded.vocabulary == model.vocabulary
        assert len(loaded.vocabulary) == 3

    @pytest.mark.parametrize(
        "data",
        [
            b"",
            b"#tfidf v2 n_docs=1\n",
            b"#tfidf v1 n_docs=x\n",
            b"#tfidf v1 n_docs=1\na\t0\t1\n",
            b"#tfidf v1 n_docs=1\na\t1\t1\t1\n",
        ],
    )
    def test_malformed(self, data):
        with pytest.raises(ModelFormatError):
            parse_tfidf(data)


class TestFormatMatrix:
    """Tests for the sparse debug export."""

    def test_col_value_pairs(self, toy_docs):
        _, matrix = fit_transform(toy_docs)
        dense = matrix.toarray()
        lines = format_matrix(matrix).splitlines()
        assert lines == [
            f"0:{dense[0, 0]:.9f} 1:{dense[0, 1]:.9f}",
            f"1:{dense[1, 1]:.9f} 2:{dense[1, 2]:.9f}",
        ]
        assert lines[0].startswith("0:0.94215")

    def test_empty_row(self, toy_docs):
        matrix = transform(fit(toy_docs), [[]])
        assert format_matrix(matrix) == "\n"
