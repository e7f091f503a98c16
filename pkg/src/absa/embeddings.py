"""Vocabulary, pretrained word vectors and nearest-neighbour search.

Vector files hold one ``word v1 ... vdim`` line per word (UTF-8, whitespace
separated). An optional word2vec-style ``count dim`` header line is skipped.
If the file has no ``<UNK>`` row, one is appended holding the mean of all
loaded vectors.
"""

import logging
import re
from collections import Counter

import numpy as np

from .errors import FormatError, VocabularyLookupError
from .nn.serialize import atomic_write_text

log = logging.getLogger(__name__)

UNK = "<UNK>"

# Words (with inner hyphens/apostrophes) or single non-space symbols, so
# punctuation survives as separate tokens.
TOKEN_RE = re.compile(r"\w+(?:['\-]\w+)*|[^\w\s]", re.UNICODE)


def tokenize_with_offsets(text):
    """Lowercased tokens with their ``(begin, end)`` character offsets in ``text``."""
    tokens, offsets = [], []
    for m in TOKEN_RE.finditer(text):
        tokens.append(m.group().lower())
        offsets.append((m.start(), m.end()))
    return tokens, offsets


def tokenize(text):
    return tokenize_with_offsets(text)[0]


def replace_rare(sentences, min_count=10, enabled=True):
    """Replace tokens seen fewer than ``min_count`` times with ``<UNK>``."""
    sentences = [list(s) for s in sentences]
    if not enabled:
        return sentences
    counts = Counter(t for s in sentences for t in s)
    return [[t if counts[t] >= min_count else UNK for t in s] for s in sentences]


class Vocabulary:
    def __init__(self, words):
        self.words = []
        self.index = {}
        for w in words:
            if w not in self.index:
                self.index[w] = len(self.words)
                self.words.append(w)
        if UNK not in self.index:
            self.index[UNK] = len(self.words)
            self.words.append(UNK)
        self.unk_id = self.index[UNK]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def id(self, word):
        return self.index.get(word, self.unk_id)


class EmbeddingTable:
    """Word vectors aligned with a :class:`Vocabulary`.

    ``unk_appended`` records whether the ``<UNK>`` row was synthesized at
    load time; such a row is not written back by :func:`save_embeddings`.
    """

    def __init__(self, vocab, matrix, unk_appended=False):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.shape[0] != len(vocab):
            raise FormatError(f"{matrix.shape[0]} rows for a vocabulary of {len(vocab)}")
        self.vocab = vocab
        self.matrix = matrix
        self.unk_appended = unk_appended

    @property
    def dim(self):
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.vocab)

    def lookup(self, token):
        return self.matrix[self.vocab.id(token)]

    def lookup_many(self, tokens):
        return self.matrix[[self.vocab.id(t) for t in tokens]].reshape(len(tokens), self.dim)

    def with_matrix(self, matrix):
        return EmbeddingTable(self.vocab, matrix, self.unk_appended)

    def nearest_neighbors(self, word, k):
        """``k`` closest words by Euclidean distance, the query excluded.

        Ties are broken by vocabulary id.
        """
        if word not in self.vocab:
            raise VocabularyLookupError(word)
        if k <= 0 or k >= len(self.vocab):
            raise ValueError(f"k must be in [1, {len(self.vocab) - 1}], got {k}")
        q = self.vocab.index[word]
        d = np.sqrt(((self.matrix - self.matrix[q]) ** 2).sum(axis=1))
        ids = np.arange(len(d))
        order = np.lexsort((ids, d))
        order = order[order != q][:k]
        return [(self.vocab.words[i], float(d[i])) for i in order]


def lookup(table, token):
    """Row for ``token``, or the ``<UNK>`` row when it is out of vocabulary."""
    return table.lookup(token)


def nearest_neighbors(table, word, k):
    return table.nearest_neighbors(word, k)


def load_embeddings(path):
    words, rows = [], []
    seen = set()
    dim = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            fields = line.split()
            if not fields:
                continue
            if lineno == 1 and len(fields) == 2 and all(x.isdigit() for x in fields):
                continue
            word, values = fields[0], fields[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise FormatError("word has no vector values", path, lineno)
            elif len(values) != dim:
                raise FormatError(f"expected {dim} values, found {len(values)}", path, lineno)
            try:
                vec = [float(x) for x in values]
            except ValueError as e:
                raise FormatError(f"bad number: {e}", path, lineno) from None
            if not np.all(np.isfinite(vec)):
                raise FormatError("non-finite vector value", path, lineno)
            if word in seen:
                log.warning("%s:%d: duplicate word %r ignored", path, lineno, word)
                continue
            seen.add(word)
            words.append(word)
            rows.append(vec)
    if not rows:
        raise FormatError("no vectors found", path)
    matrix = np.array(rows, dtype=np.float64)
    appended = UNK not in seen
    if appended:
        matrix = np.vstack([matrix, matrix.mean(axis=0)])
    vocab = Vocabulary(words)
    return vocab, EmbeddingTable(vocab, matrix, unk_appended=appended)


def dumps_embeddings(table):
    lines = []
    for i, w in enumerate(table.vocab.words):
        if table.unk_appended and i == table.vocab.unk_id:
            continue
        lines.append(w + " " + " ".join(repr(float(x)) for x in table.matrix[i]))
    return "\n".join(lines) + "\n"


def save_embeddings(path, table):
    atomic_write_text(path, dumps_embeddings(table))
