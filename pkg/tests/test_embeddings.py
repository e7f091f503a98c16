import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from absa.embeddings import (
    UNK, EmbeddingTable, Vocabulary, dumps_embeddings, load_embeddings, lookup, nearest_neighbors,
    replace_rare, save_embeddings, tokenize, tokenize_with_offsets,
)
from absa.errors import FormatError, VocabularyLookupError


def write(tmp_path, text, name="vec.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_unk_appended_as_mean(tmp_path):
    vocab, table = load_embeddings(write(tmp_path, "a 1 2 3 4\nb 0 0 0 0\nc 2 -2 3 8\n"))
    assert len(vocab) == 4 and vocab.words[-1] == UNK
    np.testing.assert_array_equal(table.lookup(UNK), [1.0, 0.0, 2.0, 4.0])
    assert table.unk_appended


def test_explicit_unk_used_verbatim(tmp_path):
    vocab, table = load_embeddings(write(tmp_path, "a 1 2\n<UNK> 9 9\nb 0 1\n"))
    assert len(vocab) == 3
    np.testing.assert_array_equal(table.lookup(UNK), [9.0, 9.0])
    assert not table.unk_appended


def test_inconsistent_dim_names_line(tmp_path):
    good = " ".join(["0.5"] * 100)
    bad = " ".join(["0.5"] * 99)
    with pytest.raises(FormatError) as e:
        load_embeddings(write(tmp_path, f"a {good}\nb {good}\nc {bad}\n"))
    assert e.value.lineno == 3


def test_empty_file(tmp_path):
    with pytest.raises(FormatError):
        load_embeddings(write(tmp_path, ""))


def test_word2vec_header_skipped(tmp_path):
    vocab, table = load_embeddings(write(tmp_path, "2 3\na 1 2 3\nb 4 5 6\n"))
    assert vocab.words == ["a", "b", UNK]


def test_lookup_known_unknown_and_unk(tmp_path):
    vocab, table = load_embeddings(write(tmp_path, "a 1 2\nb 3 4\n"))
    np.testing.assert_array_equal(lookup(table, "a"), [1.0, 2.0])
    np.testing.assert_array_equal(lookup(table, "zzz"), table.lookup(UNK))
    np.testing.assert_array_equal(lookup(table, UNK), [2.0, 3.0])


@given(st.text())
def test_lookup_is_total(token):
    table = EmbeddingTable(Vocabulary(["x"]), np.array([[1.0], [0.0]]))
    assert table.lookup(token).shape == (1,)


def toy_table():
    vocab = Vocabulary(["p0", "p1", "p5"])
    return EmbeddingTable(vocab, np.array([[0, 0], [1, 0], [5, 0], [100, 100]], dtype=float))


def test_nearest_neighbor_hand_geometry():
    assert nearest_neighbors(toy_table(), "p0", 1) == [("p1", 1.0)]


def test_duplicate_vector_ranked_first():
    vocab = Vocabulary(["a", "b", "c"])
    table = EmbeddingTable(vocab, np.array([[0.0, 1.0], [3.0, 3.0], [0.0, 1.0], [9.0, 9.0]]))
    assert nearest_neighbors(table, "a", 2)[0] == ("c", 0.0)


def test_ties_broken_by_id():
    vocab = Vocabulary(["q", "x", "y"])
    table = EmbeddingTable(vocab, np.array([[0.0], [1.0], [-1.0], [50.0]]))
    assert [w for w, _ in nearest_neighbors(table, "q", 2)] == ["x", "y"]


@pytest.mark.parametrize("seed", range(5))
def test_nearest_neighbors_match_exhaustive_sort(seed):
    rng = np.random.default_rng(seed)
    words = [f"w{i}" for i in range(20)]
    vocab = Vocabulary(words)
    table = EmbeddingTable(vocab, rng.normal(size=(21, 6)))
    for q in words:
        qi = vocab.index[q]
        pairs = []
        for j, w in enumerate(vocab.words):
            if j != qi:
                d = sum((a - b) ** 2 for a, b in zip(table.matrix[qi], table.matrix[j])) ** 0.5
                pairs.append((d, j, w))
        pairs.sort()
        got = nearest_neighbors(table, q, 5)
        assert [w for w, _ in got] == [w for _, _, w in pairs[:5]]
        np.testing.assert_allclose([d for _, d in got], [d for d, _, _ in pairs[:5]], rtol=1e-12)
        assert all(a <= b for (_, a), (_, b) in zip(got, got[1:]))


def test_oov_query_rejected():
    with pytest.raises(VocabularyLookupError):
        nearest_neighbors(toy_table(), "nope", 1)


def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    vocab = Vocabulary(["één", "b", "c"])
    mat = rng.normal(size=(3, 5))
    table = EmbeddingTable(vocab, np.vstack([mat, mat.mean(axis=0)]), unk_appended=True)
    path = str(tmp_path / "out.txt")
    save_embeddings(path, table)
    vocab2, table2 = load_embeddings(path)
    assert vocab2.words == vocab.words
    assert table2.matrix.tobytes() == table.matrix.tobytes()
    assert dumps_embeddings(table2) == dumps_embeddings(table)


def test_tokenizer_keeps_punctuation_and_lowercases():
    assert tokenize("The sake menu shouldn't be overlooked!") == \
        ["the", "sake", "menu", "shouldn't", "be", "overlooked", "!"]
    assert tokenize("Great service, great food.") == ["great", "service", ",", "great", "food", "."]


def test_tokenizer_offsets_index_the_text():
    text = "A well-made, cheap-ish   blade."
    tokens, offsets = tokenize_with_offsets(text)
    assert [text[b:e].lower() for b, e in offsets] == tokens


def test_replace_rare():
    sents = [["a", "b"], ["a", "c"], ["a"]]
    assert replace_rare(sents, min_count=2) == [["a", UNK], ["a", UNK], ["a"]]
    assert replace_rare(sents, min_count=2, enabled=False) == sents
    assert replace_rare([["x"] * 9 + ["y"] * 10])[0][:1] == [UNK]
