"""IOB2 encoding of aspect-term spans.

Tag indices follow the 1-of-K order ``I, O, B``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EncodingError, SpanError, ValidityError

I, O, B = "I", "O", "B"
TAGS = (I, O, B)
TAG_INDEX = {t: k for k, t in enumerate(TAGS)}


@dataclass(frozen=True, order=True)
class AspectSpan:
    """Half-open token span ``[start, end)`` with an optional polarity."""

    start: int
    end: int
    polarity: Optional[str] = None

    @property
    def bounds(self):
        return (self.start, self.end)


def tag_vector(tag):
    v = np.zeros(len(TAGS))
    v[TAG_INDEX[tag]] = 1.0
    return v


def tag_matrix(tags):
    m = np.zeros((len(tags), len(TAGS)))
    m[np.arange(len(tags)), [TAG_INDEX[t] for t in tags]] = 1.0
    return m


def _bounds(span):
    return span.bounds if isinstance(span, AspectSpan) else tuple(span)


def encode(spans, sentence_len):
    tags = [O] * sentence_len
    ordered = sorted((_bounds(s) for s in spans))
    for start, end in ordered:
        if not 0 <= start < end <= sentence_len:
            raise SpanError(f"span [{start}, {end}) invalid for a sentence of {sentence_len} tokens")
    for (s1, e1), (s2, e2) in zip(ordered, ordered[1:]):
        if s2 < e1:
            raise EncodingError(f"overlapping spans [{s1}, {e1}) and [{s2}, {e2})")
    for start, end in ordered:
        tags[start] = B
        for k in range(start + 1, end):
            tags[k] = I
    return tags


def first_invalid(tags):
    """Index of the first ``I`` that starts a span, or ``None`` if the sequence is valid."""
    prev = O
    for k, t in enumerate(tags):
        if t not in TAG_INDEX:
            raise ValidityError(f"unknown tag {t!r} at index {k}", k)
        if t == I and prev == O:
            return k
        prev = t
    return None


def decode(tags):
    """Spans ``[start, end)`` for each maximal ``B I*`` run."""
    bad = first_invalid(tags)
    if bad is not None:
        raise ValidityError(f"I tag at index {bad} does not continue a span", bad)
    spans = []
    start = None
    for k, t in enumerate(tags):
        if t == B:
            if start is not None:
                spans.append((start, k))
            start = k
        elif t == O and start is not None:
            spans.append((start, k))
            start = None
    if start is not None:
        spans.append((start, len(tags)))
    return spans


def repair(tags):
    """Turn every ``I`` after an ``O`` (or at position 0) into ``B``."""
    out = list(tags)
    prev = O
    for k, t in enumerate(out):
        if t == I and prev == O:
            out[k] = B
        prev = out[k]
    return out
