"""Deterministic templated review corpus and matching toy resources.

Word vectors are drawn around one centroid per word class, and all opinion
words share a centroid regardless of polarity: the word channel identifies
opinion words but only weakly separates positive from negative. The
polarity signal is carried cleanly by the sentic channel.
"""

import os
from importlib import resources

import numpy as np

from .corpus import Sentence, dumps_corpus, fallback_pos_tags
from .embeddings import EmbeddingTable, Vocabulary, dumps_embeddings
from .features import PENN_TAGS, SENTIC_DIM
from .iob2 import AspectSpan
from .nn.serialize import atomic_write_text

ASPECTS = (
    "service", "food", "staff", "price", "screen", "keyboard", "pasta", "waiter", "view", "decor",
    "sake menu", "battery life", "wine selection", "french onion soup", "straight edge",
    "serrated portion", "customer support",
)
POSITIVE = ("great", "excellent", "sharp", "delicious", "friendly", "superb", "amazing", "lovely",
            "perfect", "fantastic")
NEGATIVE = ("terrible", "awful", "bland", "rude", "slow", "marginal", "poor", "horrible",
            "mediocre", "disappointing")
FUNCTION = ("the", "was", "is", "and", "but", "i", "thought", "we", "found", "very", "really",
            "it", "so", "of", "visit", "our")
PUNCT = (".", "!", ",")

# {A}/{B}: aspect slots, {o}/{p}: opinion slots for the matching aspect.
TEMPLATES = (
    "the {A} was {o} .",
    "{o} {A} !",
    "the {A} was {o} but the {B} was {p} .",
    "we found the {A} really {o} .",
    "{o} {A} , {p} {B} .",
    "i thought the {A} is very {o} and the {B} {p} .",
    "our visit was so {o} .",
    "it is {o} , really .",
)

DEFAULT_SEED = 13
WORD_DIM = 100
CLASS_NOISE = {"aspect": 0.6, "opinion": 0.35, "function": 0.6, "punct": 0.6}


def vocabulary_words():
    words = []
    for a in ASPECTS:
        words.extend(a.split())
    words += list(POSITIVE) + list(NEGATIVE) + list(FUNCTION) + list(PUNCT)
    out, seen = [], set()
    for w in words:
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def word_class(word):
    if word in POSITIVE or word in NEGATIVE:
        return "opinion"
    if word in PUNCT:
        return "punct"
    if word in FUNCTION:
        return "function"
    return "aspect"


def make_embeddings(seed=DEFAULT_SEED, dim=WORD_DIM):
    rng = np.random.default_rng(seed)
    centroids = {c: rng.normal(size=dim) / np.sqrt(dim) * 3.0 for c in CLASS_NOISE}
    words = vocabulary_words()
    rows = []
    for w in words:
        c = word_class(w)
        rows.append(centroids[c] + CLASS_NOISE[c] * rng.normal(size=dim) / np.sqrt(dim) * 3.0)
    rows = np.round(np.array(rows), 6)
    vocab = Vocabulary(words)
    matrix = np.vstack([rows, rows.mean(axis=0)])
    return EmbeddingTable(vocab, matrix, unk_appended=True)


def make_sentic(seed=DEFAULT_SEED):
    """``{word: 5-vector}`` for opinion words, plus a few weak entries for aspects."""
    rng = np.random.default_rng(seed + 1)
    out = {}
    for sign, words in ((1.0, POSITIVE), (-1.0, NEGATIVE)):
        for w in words:
            pol = sign * rng.uniform(0.5, 0.9)
            out[w] = np.round([0.8 * pol + rng.normal(0, 0.05), rng.uniform(-0.3, 0.3),
                               rng.uniform(-0.3, 0.3), 0.5 * pol, pol], 3)
    for w in ("food", "service", "price", "view"):
        out[w] = np.round(rng.uniform(-0.1, 0.1, size=SENTIC_DIM), 3)
    return out


def synonym_lines():
    return [
        "great excellent superb fantastic",
        "excellent great superb",
        "amazing fantastic great",
        "terrible awful horrible",
        "awful terrible horrible",
        "poor mediocre",
        "staff waiter",
        "waiter staff",
        "food pasta",
    ]


def make_sentence(rng, template=None, sid=""):
    if template is None:
        template = TEMPLATES[rng.integers(len(TEMPLATES))]
    aspects = rng.choice(len(ASPECTS), size=2, replace=False)
    polar = rng.integers(2, size=2)
    tokens, spans = [], []
    for slot in template.split():
        if slot in ("{A}", "{B}"):
            k = 0 if slot == "{A}" else 1
            words = ASPECTS[aspects[k]].split()
            spans.append(AspectSpan(len(tokens), len(tokens) + len(words), ("positive", "negative")[polar[k]]))
            tokens.extend(words)
        elif slot in ("{o}", "{p}"):
            k = 0 if slot == "{o}" else 1
            pool = POSITIVE if polar[k] == 0 else NEGATIVE
            tokens.append(pool[rng.integers(len(pool))])
        else:
            tokens.append(slot)
    text_tokens = [tokens[0].capitalize()] + tokens[1:]
    text = " ".join(text_tokens)
    offsets, pos = [], 0
    for t in text_tokens:
        offsets.append((pos, pos + len(t)))
        pos += len(t) + 1
    return Sentence(tokens, fallback_pos_tags(tokens), sorted(spans), text, offsets, sid)


def make_corpus(n=100, seed=DEFAULT_SEED, prefix="syn"):
    rng = np.random.default_rng(seed + 2)
    return [make_sentence(rng, sid=f"{prefix}-{i:04d}") for i in range(n)]


def sentic_tsv(lexicon):
    lines = [w + "\t" + "\t".join(repr(float(x)) for x in v) for w, v in lexicon.items()]
    lines.append("beautiful_music\t0.9\t0.1\t0.1\t0.6\t0.8")
    return "\n".join(lines) + "\n"


FILES = ("corpus.jsonl", "embeddings.txt", "sentic.tsv", "postags.txt", "synonyms.txt")


def write_resources(directory, n=100, seed=DEFAULT_SEED):
    """Write the corpus and all resources; returns ``{name: path}``."""
    os.makedirs(directory, exist_ok=True)
    texts = {
        "corpus.jsonl": dumps_corpus(make_corpus(n, seed)),
        "embeddings.txt": dumps_embeddings(make_embeddings(seed)),
        "sentic.tsv": sentic_tsv(make_sentic(seed)),
        "postags.txt": "\n".join(PENN_TAGS) + "\n",
        "synonyms.txt": "\n".join(synonym_lines()) + "\n",
    }
    paths = {}
    for name, text in texts.items():
        paths[name] = os.path.join(directory, name)
        atomic_write_text(paths[name], text)
    return paths


def packaged_path(name):
    """Path of a file in the packaged synthetic data set."""
    return str(resources.files("absa") / "data" / "synthetic" / name)
