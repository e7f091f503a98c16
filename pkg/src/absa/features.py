"""Per-token feature channels: sentic vectors, POS one-hots, distance embeddings."""

import logging

import numpy as np

from .errors import AlignmentError, FormatError, SpanError, TaggingError
from .nn.graph import Parameter
from .nn.layers import glorot_uniform

log = logging.getLogger(__name__)

SENTIC_DIM = 5
SENTIC_FIELDS = ("pleasantness", "attention", "sensitivity", "aptitude", "polarity")
DISTANCE_DIM = 10
DEFAULT_CLIP_RADIUS = 30

# Penn Treebank tag set as emitted by the Stanford tagger (36 word tags + 9 punctuation/symbol tags).
PENN_TAGS = (
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP",
    "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB",
    "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB",
    "$", "#", "``", "''", "-LRB-", "-RRB-", ",", ".", ":",
)


class SenticLexicon:
    """Single-word sentic vectors; unknown words map to the zero vector.

    ``rejected`` counts multi-word concepts (keys containing ``_``) that
    were skipped at load time.
    """

    def __init__(self, vectors=None):
        self.vectors = {}
        self.rejected = 0
        for word, vec in (vectors or {}).items():
            self.add(word, vec)

    def add(self, word, vec):
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (SENTIC_DIM,):
            raise FormatError(f"sentic vector for {word!r} has shape {vec.shape}")
        self.vectors[word] = vec

    def __contains__(self, word):
        return word in self.vectors

    def __len__(self):
        return len(self.vectors)

    def lookup(self, token):
        v = self.vectors.get(token)
        return v.copy() if v is not None else np.zeros(SENTIC_DIM)

    def lookup_many(self, tokens):
        return np.array([self.lookup(t) for t in tokens]).reshape(len(tokens), SENTIC_DIM)

    @classmethod
    def load(cls, path, vocab=None):
        """Read ``word<TAB>v1<TAB>...<TAB>v5`` lines.

        With ``vocab``, words outside it are not kept.
        """
        lex = cls()
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                fields = line.split("\t")
                if len(fields) != SENTIC_DIM + 1:
                    raise FormatError(f"expected word and {SENTIC_DIM} values, found {len(fields) - 1}", path, lineno)
                word = fields[0].strip()
                if "_" in word or " " in word:
                    lex.rejected += 1
                    continue
                try:
                    vec = [float(x) for x in fields[1:]]
                except ValueError as e:
                    raise FormatError(f"bad number: {e}", path, lineno) from None
                if vocab is not None and word not in vocab:
                    continue
                lex.add(word, vec)
        if lex.rejected:
            log.info("%s: skipped %d multi-word concepts", path, lex.rejected)
        return lex


def sentic_lookup(lexicon, token):
    return lexicon.lookup(token)


class PosTagSet:
    def __init__(self, tags=PENN_TAGS):
        self.tags = list(tags)
        self.index = {}
        for i, t in enumerate(self.tags):
            if t in self.index:
                raise FormatError(f"duplicate POS tag {t!r}")
            self.index[t] = i

    def __len__(self):
        return len(self.tags)

    def onehot(self, tag):
        try:
            i = self.index[tag]
        except KeyError:
            raise TaggingError(f"unknown POS tag {tag!r}") from None
        v = np.zeros(len(self.tags))
        v[i] = 1.0
        return v

    def onehot_many(self, tags):
        m = np.zeros((len(tags), len(self.tags)))
        for row, tag in enumerate(tags):
            if tag not in self.index:
                raise TaggingError(f"unknown POS tag {tag!r} at token {row}")
            m[row, self.index[tag]] = 1.0
        return m

    @classmethod
    def load(cls, path):
        tags = []
        with open(path, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    tags.append(line.strip())
        return cls(tags)

    def dumps(self):
        return "\n".join(self.tags) + "\n"


def pos_onehot(tagset, tag):
    return tagset.onehot(tag)


def distance_tags(sentence_len, span):
    """Signed offset of each token from the span ``[start, end)``.

    Tokens inside the span get 0, tokens before it ``i - start`` and tokens
    after it ``i - (end - 1)``.
    """
    start, end = span
    if not 0 <= start < end <= sentence_len:
        raise SpanError(f"span [{start}, {end}) invalid for a sentence of {sentence_len} tokens")
    return [i - start if i < start else (i - end + 1 if i >= end else 0) for i in range(sentence_len)]


class DistanceEmbeddingTable:
    """Learnable ``(2 * clip_radius + 1, 10)`` table indexed by clamped offset."""

    def __init__(self, rng, clip_radius=DEFAULT_CLIP_RADIUS, dim=DISTANCE_DIM, name="distance"):
        self.clip_radius = clip_radius
        self.dim = dim
        self.name = name
        rows = 2 * clip_radius + 1
        w, limit = glorot_uniform(rng, rows, dim, (rows, dim))
        self.table = Parameter(f"{name}.table", w)
        self.init_info = {"table": f"uniform(+-{limit!r})"}

    def parameters(self):
        return [self.table]

    def indices(self, offsets):
        r = self.clip_radius
        return [min(max(d, -r), r) + r for d in offsets]

    def apply(self, g, offsets):
        return g.take_rows(g.param(self.table), self.indices(offsets))


def fuse(channels):
    """Concatenate per-token channel matrices (each ``(N, d_k)``) into ``(N, sum d_k)``."""
    channels = [np.asarray(c, dtype=np.float64) for c in channels]
    if not channels:
        raise AlignmentError("no feature channels enabled")
    lengths = {c.shape[0] for c in channels}
    if len(lengths) != 1:
        raise AlignmentError(f"feature channels disagree on sentence length: {sorted(lengths)}")
    return np.concatenate(channels, axis=1)


class FeatureSpace:
    """Resolves a tokenized sentence into the fused (word, sentic, POS) matrix.

    Disabled channels are omitted entirely, shrinking the input width.
    """

    def __init__(self, embeddings, sentic=None, tagset=None, use_sentic=True, use_pos=True):
        self.embeddings = embeddings
        self.sentic = sentic if use_sentic else None
        self.tagset = tagset if use_pos else None
        if use_sentic and sentic is None:
            raise FormatError("sentic channel enabled but no lexicon given")
        if use_pos and tagset is None:
            raise FormatError("POS channel enabled but no tag set given")

    @property
    def use_sentic(self):
        return self.sentic is not None

    @property
    def use_pos(self):
        return self.tagset is not None

    @property
    def dim(self):
        d = self.embeddings.dim
        if self.use_sentic:
            d += SENTIC_DIM
        if self.use_pos:
            d += len(self.tagset)
        return d

    def channel_dims(self):
        dims = {"word": self.embeddings.dim}
        if self.use_sentic:
            dims["sentic"] = SENTIC_DIM
        if self.use_pos:
            dims["pos"] = len(self.tagset)
        return dims

    def encode(self, tokens, pos=None):
        channels = [self.embeddings.lookup_many(tokens)]
        if self.use_sentic:
            channels.append(self.sentic.lookup_many(tokens))
        if self.use_pos:
            if pos is None or len(pos) != len(tokens):
                raise AlignmentError(
                    f"POS channel needs one tag per token ({len(tokens)} tokens, "
                    f"{'no' if pos is None else len(pos)} tags)")
            channels.append(self.tagset.onehot_many(pos))
        return fuse(channels)
