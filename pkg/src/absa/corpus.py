"""Corpus records and ingestion of line-delimited JSON review data.

One JSON object per line::

    {"id": "r1",                       # optional, defaults to the line number
     "text": "The sake menu should not be overlooked!",
     "tokens": ["The", "sake", ...],   # optional pre-tokenization
     "pos": ["DT", "NN", ...],         # optional; fallback tagger if absent
     "aspects": [{"term": "sake menu", "from": 4, "to": 13,
                  "polarity": "positive"}]}

``from``/``to`` are character offsets into ``text`` (end exclusive). Only
``positive``/``negative`` annotations on explicit terms are kept; every
dropped annotation is recorded on its sentence with a reason.
"""

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .embeddings import tokenize_with_offsets
from .errors import FormatError
from .iob2 import AspectSpan

log = logging.getLogger(__name__)

POLARITIES = ("positive", "negative")


@dataclass
class Sentence:
    tokens: list
    pos: Optional[list] = None
    aspects: list = field(default_factory=list)
    text: Optional[str] = None
    offsets: Optional[list] = None
    id: str = ""
    dropped: list = field(default_factory=list)

    def __len__(self):
        return len(self.tokens)

    def spans(self):
        """Distinct aspect bounds in start order."""
        return sorted({a.bounds for a in self.aspects})

    def char_span(self, span):
        start, end = span.bounds if isinstance(span, AspectSpan) else span
        if self.offsets is None:
            return (start, end)
        return (self.offsets[start][0], self.offsets[end - 1][1])

    def to_record(self):
        rec = {"id": self.id, "text": self.text if self.text is not None else " ".join(self.tokens)}
        if self.text is None:
            rec["tokens"] = list(self.tokens)
        if self.pos is not None:
            rec["pos"] = list(self.pos)
        aspects = []
        for a in self.aspects:
            b, e = self.char_span(a) if self.text is not None else _joined_offsets(self.tokens, a)
            aspects.append({"term": rec["text"][b:e], "from": b, "to": e, "polarity": a.polarity})
        rec["aspects"] = aspects
        return rec


CorpusRecord = Sentence


def _joined_offsets(tokens, span):
    pos, offs = 0, []
    for t in tokens:
        offs.append((pos, pos + len(t)))
        pos += len(t) + 1
    return offs[span.start][0], offs[span.end - 1][1]


def _align_tokens(text, tokens, source, lineno):
    lowered = text.lower()
    offsets, pos = [], 0
    for t in tokens:
        k = lowered.find(t.lower(), pos)
        if k < 0 or lowered[pos:k].strip():
            raise FormatError(f"token {t!r} cannot be aligned to the text", source, lineno)
        offsets.append((k, k + len(t)))
        pos = k + len(t)
    return [t.lower() for t in tokens], offsets


def _map_annotations(raw, offsets, source, lineno):
    """Return ``(kept AspectSpans, [(annotation, reason), ...])``."""
    starts = {b: k for k, (b, _) in enumerate(offsets)}
    ends = {e: k for k, (_, e) in enumerate(offsets)}
    kept, dropped, seen = [], [], set()
    for ann in raw:
        if not isinstance(ann, dict):
            raise FormatError("aspect annotations must be objects", source, lineno)
        term = ann.get("term")
        polarity = ann.get("polarity")
        if term == "NULL" or ann.get("from") is None or ann.get("to") is None:
            dropped.append((ann, "null aspect"))
            continue
        if polarity not in POLARITIES:
            dropped.append((ann, f"polarity {polarity!r}"))
            continue
        try:
            b, e = int(ann["from"]), int(ann["to"])
        except (TypeError, ValueError):
            raise FormatError("aspect offsets must be integers", source, lineno) from None
        if b not in starts or e not in ends or ends[e] < starts[b]:
            dropped.append((ann, "offset misalignment"))
            continue
        key = (b, e, polarity)
        if key in seen:
            dropped.append((ann, "duplicate"))
            continue
        span = AspectSpan(starts[b], ends[e] + 1, polarity)
        if any(s.bounds != span.bounds and s.start < span.end and span.start < s.end for s in kept):
            dropped.append((ann, "overlap"))
            continue
        seen.add(key)
        kept.append(span)
    kept.sort()
    return kept, dropped


def parse_record(obj, source="<record>", lineno=None, tagger=None):
    if not isinstance(obj, dict) or not isinstance(obj.get("text"), str):
        raise FormatError("record needs a string 'text' field", source, lineno)
    text = obj["text"]
    if obj.get("tokens") is not None:
        if not isinstance(obj["tokens"], list) or not all(isinstance(t, str) for t in obj["tokens"]):
            raise FormatError("'tokens' must be a list of strings", source, lineno)
        tokens, offsets = _align_tokens(text, obj["tokens"], source, lineno)
    else:
        tokens, offsets = tokenize_with_offsets(text)
    pos = obj.get("pos")
    if pos is not None:
        if not isinstance(pos, list) or len(pos) != len(tokens):
            raise FormatError(f"'pos' must list one tag per token ({len(tokens)} tokens)", source, lineno)
    elif tagger is not None:
        pos = tagger(tokens)
    aspects = obj.get("aspects", [])
    if not isinstance(aspects, list):
        raise FormatError("'aspects' must be a list", source, lineno)
    kept, dropped = _map_annotations(aspects, offsets, source, lineno)
    rid = obj.get("id", "" if lineno is None else str(lineno))
    return Sentence(tokens, pos, kept, text, offsets, str(rid), dropped)


def ingest(path, tagger=None):
    """Read a JSONL corpus. Sentences lacking POS tags get ``tagger(tokens)`` if given."""
    if tagger is None:
        tagger = fallback_pos_tags
    records = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise FormatError(f"invalid JSON: {e.msg}", path, lineno) from None
            records.append(parse_record(obj, path, lineno, tagger))
    counts = drop_counts(records)
    if counts:
        log.info("%s: dropped annotations %s", path, dict(sorted(counts.items())))
    return records


def drop_counts(records):
    return Counter(reason for r in records for _, reason in r.dropped)


def dumps_corpus(sentences):
    return "".join(json.dumps(s.to_record(), ensure_ascii=False, sort_keys=True) + "\n" for s in sentences)


# Fallback POS tagging: closed-class lookup, then suffix rules, then NN.
_CLOSED = {
    "the": "DT", "a": "DT", "an": "DT", "this": "DT", "that": "DT", "these": "DT", "every": "DT",
    "and": "CC", "but": "CC", "or": "CC", "yet": "CC",
    "is": "VBZ", "was": "VBD", "are": "VBP", "were": "VBD", "be": "VB", "been": "VBN", "seems": "VBZ",
    "seemed": "VBD", "felt": "VBD", "looked": "VBD", "tasted": "VBD", "has": "VBZ", "had": "VBD",
    "i": "PRP", "we": "PRP", "it": "PRP", "they": "PRP", "you": "PRP", "my": "PRP$", "our": "PRP$",
    "its": "PRP$", "their": "PRP$",
    "of": "IN", "in": "IN", "at": "IN", "on": "IN", "with": "IN", "for": "IN", "from": "IN",
    "to": "TO", "not": "RB", "very": "RB", "really": "RB", "quite": "RB", "too": "RB", "so": "RB",
    "should": "MD", "would": "MD", "can": "MD", "could": "MD", "will": "MD",
    "think": "VBP", "thought": "VBD", "loved": "VBD", "hated": "VBD", "found": "VBD",
    ".": ".", "!": ".", "?": ".", ",": ",", ";": ":", ":": ":", "(": "-LRB-", ")": "-RRB-",
    "good": "JJ", "great": "JJ", "excellent": "JJ", "sharp": "JJ", "superb": "JJ", "amazing": "JJ",
    "lovely": "JJ", "perfect": "JJ", "fantastic": "JJ", "terrible": "JJ", "awful": "JJ", "bland": "JJ",
    "rude": "JJ", "slow": "JJ", "marginal": "JJ", "poor": "JJ", "horrible": "JJ", "mediocre": "JJ",
    "fine": "JJ", "bad": "JJ", "nice": "JJ",
    "$": "$", "#": "#", "\"": "''", "'": "''", "`": "``",
}
_SUFFIXES = (("ly", "RB"), ("ing", "VBG"), ("ed", "VBD"), ("est", "JJS"), ("ous", "JJ"),
             ("ful", "JJ"), ("ive", "JJ"), ("able", "JJ"), ("ible", "JJ"), ("al", "JJ"), ("ss", "NN"),
             ("s", "NNS"))


def fallback_pos_tag(token):
    if token in _CLOSED:
        return _CLOSED[token]
    if token.isdigit():
        return "CD"
    if not any(ch.isalnum() for ch in token):
        return "SYM"
    for suffix, tag in _SUFFIXES:
        if token.endswith(suffix) and len(token) > len(suffix) + 1:
            return tag
    return "NN"


def fallback_pos_tags(tokens):
    return [fallback_pos_tag(t) for t in tokens]
