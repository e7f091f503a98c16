"""Aspect-term tagger and aspect-specific polarity classifier.

Tagger: fused token features -> BiGRU(25 + 25) -> dense(50) -> dense(3) +
softmax per token over ``I, O, B``.

Classifier: fused token features plus a learned distance embedding ->
BiGRU(25 + 25) -> ``[last forward state; first backward state]`` ->
dense(50) -> dense(2) + softmax over ``positive, negative``.

Both are trained one sentence (or aspect instance) per Adam step on summed
cross-entropy.
"""

import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from . import iob2
from .errors import ConfigurationError, NumericError, ShapeError, SpanError
from .features import DEFAULT_CLIP_RADIUS, DISTANCE_DIM, DistanceEmbeddingTable, distance_tags
from .nn import Adam, BiGRU, Dense, Graph
from .nn.serialize import assign_params, atomic_write_text, dumps_params, load_params

LABELS = ("positive", "negative")
LABEL_INDEX = {label: k for k, label in enumerate(LABELS)}
MANIFEST_NAME = "manifest.json"
PARAMS_NAME = "params.json"


@dataclass
class ModelConfig:
    hidden_dim: int = 25
    dense_dim: int = 50
    activation: str = "tanh"
    seed: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_radius: int = DEFAULT_CLIP_RADIUS
    distance_dim: int = DISTANCE_DIM


@dataclass
class TrainTrace:
    epoch_loss: list = field(default_factory=list)
    steps: int = 0
    epochs: int = 0


class _Model:
    kind = ""

    def parameters(self):
        raise NotImplementedError

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def optimizer(self):
        if self._optimizer is None:
            c = self.config
            self._optimizer = Adam(self.parameters(), lr=c.lr, beta1=c.beta1, beta2=c.beta2, eps=c.eps)
        return self._optimizer

    def parameter_count(self):
        return sum(p.value.size for p in self.parameters())

    def init_info(self):
        out = {}
        for layer in self._layers():
            for key, val in layer.init_info.items():
                out[f"{layer.name}.{key}"] = val
        return out

    def _layers(self):
        raise NotImplementedError


class TaggerModel(_Model):
    kind = "tagger"

    def __init__(self, features, config=None):
        self.config = config or ModelConfig()
        self.features = features
        self.input_dim = features.dim
        if self.input_dim != sum(features.channel_dims().values()):
            raise ShapeError("tagger input width does not match its channels")
        rng = np.random.default_rng(self.config.seed)
        c = self.config
        self.bigru = BiGRU(self.input_dim, c.hidden_dim, rng, name="tagger.bigru")
        self.hidden = Dense(2 * c.hidden_dim, c.dense_dim, rng, c.activation, name="tagger.hidden")
        self.output = Dense(c.dense_dim, len(iob2.TAGS), rng, "linear", name="tagger.output")
        self._optimizer = None

    def _layers(self):
        return [self.bigru.fwd, self.bigru.bwd, self.hidden, self.output]

    def parameters(self):
        return self.bigru.parameters() + self.hidden.parameters() + self.output.parameters()

    def inputs(self, sentence):
        return self.features.encode(sentence.tokens, sentence.pos)

    def logits(self, g, x):
        states, _, _ = self.bigru.apply(g, g.constant(x))
        return self.output.apply(g, self.hidden.apply(g, states))

    def loss(self, x, targets):
        g = Graph()
        node = g.softmax_cross_entropy(self.logits(g, x), targets)
        return g, node

    def predict_proba(self, sentence):
        if len(sentence) == 0:
            return np.zeros((0, len(iob2.TAGS)))
        g = Graph()
        logits = self.logits(g, self.inputs(sentence)).value
        return _softmax_rows(logits)


class PolarityModel(_Model):
    kind = "classifier"

    def __init__(self, features, config=None):
        self.config = config or ModelConfig()
        self.features = features
        c = self.config
        rng = np.random.default_rng(c.seed)
        self.distance = DistanceEmbeddingTable(rng, c.clip_radius, c.distance_dim, name="classifier.distance")
        self.input_dim = features.dim + c.distance_dim
        self.bigru = BiGRU(self.input_dim, c.hidden_dim, rng, name="classifier.bigru")
        self.hidden = Dense(2 * c.hidden_dim, c.dense_dim, rng, c.activation, name="classifier.hidden")
        self.output = Dense(c.dense_dim, len(LABELS), rng, "linear", name="classifier.output")
        self._optimizer = None

    def _layers(self):
        return [self.distance, self.bigru.fwd, self.bigru.bwd, self.hidden, self.output]

    def parameters(self):
        return (self.distance.parameters() + self.bigru.parameters()
                + self.hidden.parameters() + self.output.parameters())

    def inputs(self, sentence):
        return self.features.encode(sentence.tokens, sentence.pos)

    def logits(self, g, x, span):
        n = x.shape[0]
        offsets = distance_tags(n, span)
        u = g.concat([g.constant(x), self.distance.apply(g, offsets)], axis=1)
        _, hf, hb = self.bigru.apply(g, u)
        pooled = g.concat([g.row(hf, n - 1), g.row(hb, 0)])
        return self.output.apply(g, self.hidden.apply(g, pooled))

    def loss(self, x, span, target):
        g = Graph()
        node = g.softmax_cross_entropy(self.logits(g, x, span), target)
        return g, node

    def predict_proba(self, sentence, span, x=None):
        if x is None:
            x = self.inputs(sentence)
        g = Graph()
        return _softmax_rows(self.logits(g, x, span).value[None, :])[0]


def _softmax_rows(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _check_finite(value, what):
    if not np.isfinite(value):
        raise NumericError(f"non-finite loss during {what}")


# inference


def tag_sentence(model, sentence):
    """Return ``(per-token distributions, repaired tags, spans)``."""
    q = model.predict_proba(sentence)
    raw = [iob2.TAGS[k] for k in np.argmax(q, axis=1)] if len(q) else []
    tags = iob2.repair(raw)
    return q, tags, iob2.decode(tags)


def classify_aspect(model, sentence, span, x=None):
    """Return ``(label, q)``; ties go to the lower label index (``positive``)."""
    bounds = span.bounds if isinstance(span, iob2.AspectSpan) else tuple(span)
    if not 0 <= bounds[0] < bounds[1] <= len(sentence):
        raise SpanError(f"span {bounds} invalid for a sentence of {len(sentence)} tokens")
    q = model.predict_proba(sentence, bounds, x)
    return LABELS[int(np.argmax(q))], q


def extract_opinions(tagger, classifier, sentence):
    """``[(span, polarity), ...]`` in span start order."""
    _, _, spans = tag_sentence(tagger, sentence)
    if not spans:
        return []
    x = classifier.inputs(sentence)
    return [(span, classify_aspect(classifier, sentence, span, x)[0]) for span in spans]


# training


def aspect_instances(sentences):
    """One ``(sentence, (start, end), label)`` per polarity-labelled aspect."""
    out = []
    for s in sentences:
        for a in s.aspects:
            if a.polarity in LABEL_INDEX:
                out.append((s, a.bounds, a.polarity))
    return out


def _order(n, epoch_rng, shuffle):
    return epoch_rng.permutation(n) if shuffle else np.arange(n)


def _check_epochs(epochs, items, what):
    if epochs < 1:
        raise ConfigurationError(f"epochs must be >= 1, got {epochs}")
    if not items:
        raise ConfigurationError(f"empty {what}")


def train_tagger(model, corpus, epochs, shuffle=True, seed=None, callback=None):
    """Per-sentence Adam training; returns a :class:`TrainTrace`.

    ``callback(epoch, model)`` runs after each epoch; returning True stops
    training early.
    """
    corpus = list(corpus)
    _check_epochs(epochs, corpus, "training corpus")
    data = [(model.inputs(s), iob2.tag_matrix(iob2.encode(s.spans(), len(s)))) for s in corpus if len(s)]
    if not data:
        raise ConfigurationError("training corpus has no tokens")
    rng = np.random.default_rng(model.config.seed if seed is None else seed)
    opt = model.optimizer()
    trace = TrainTrace()
    for epoch in range(epochs):
        total = 0.0
        for k in _order(len(data), rng, shuffle):
            x, targets = data[k]
            model.zero_grad()
            g, loss = model.loss(x, targets)
            _check_finite(loss.value, "tagger training")
            g.backward(loss)
            opt.step()
            total += float(loss.value)
            trace.steps += 1
        trace.epoch_loss.append(total / len(data))
        trace.epochs += 1
        if callback is not None and callback(epoch + 1, model):
            break
    return trace


def train_classifier(model, instances, epochs, shuffle=True, seed=None, callback=None):
    instances = list(instances)
    _check_epochs(epochs, instances, "instance set")
    cache = {}
    data = []
    for sentence, span, label in instances:
        key = id(sentence)
        if key not in cache:
            cache[key] = model.inputs(sentence)
        target = np.zeros(len(LABELS))
        target[LABEL_INDEX[label]] = 1.0
        data.append((cache[key], tuple(span), target))
    rng = np.random.default_rng(model.config.seed if seed is None else seed)
    opt = model.optimizer()
    trace = TrainTrace()
    for epoch in range(epochs):
        total = 0.0
        for k in _order(len(data), rng, shuffle):
            x, span, target = data[k]
            model.zero_grad()
            g, loss = model.loss(x, span, target)
            _check_finite(loss.value, "classifier training")
            g.backward(loss)
            opt.step()
            total += float(loss.value)
            trace.steps += 1
        trace.epoch_loss.append(total / len(data))
        trace.epochs += 1
        if callback is not None and callback(epoch + 1, model):
            break
    return trace


def mean_loss(model, items):
    """Mean per-item loss under the current parameters (no update)."""
    losses = []
    for item in items:
        if isinstance(model, TaggerModel):
            s = item
            _, node = model.loss(model.inputs(s), iob2.tag_matrix(iob2.encode(s.spans(), len(s))))
        else:
            s, span, label = item
            target = np.zeros(len(LABELS))
            target[LABEL_INDEX[label]] = 1.0
            _, node = model.loss(model.inputs(s), tuple(span), target)
        losses.append(float(node.value))
    return float(np.mean(losses))


# persistence


def manifest(model, trace=None, extra=None):
    f = model.features
    doc = {
        "kind": model.kind,
        "config": asdict(model.config),
        "channels": {"sentic": f.use_sentic, "pos": f.use_pos, "distance": model.kind == "classifier"},
        "channel_dims": f.channel_dims(),
        "input_dim": model.input_dim,
        "parameter_count": model.parameter_count(),
        "outputs": list(iob2.TAGS) if model.kind == "tagger" else list(LABELS),
        "init": model.init_info(),
        "seed": model.config.seed,
    }
    if trace is not None:
        doc["trace"] = {"epoch_loss": trace.epoch_loss, "epochs": trace.epochs, "steps": trace.steps}
    if extra:
        doc.update(extra)
    return doc


def save_model(model, directory, trace=None, extra=None):
    os.makedirs(directory, exist_ok=True)
    atomic_write_text(os.path.join(directory, PARAMS_NAME), dumps_params(model.parameters()))
    text = json.dumps(manifest(model, trace, extra), indent=1, sort_keys=True) + "\n"
    atomic_write_text(os.path.join(directory, MANIFEST_NAME), text)


def read_manifest(directory):
    with open(os.path.join(directory, MANIFEST_NAME), encoding="utf-8") as f:
        return json.load(f)


def load_model(directory, features):
    doc = read_manifest(directory)
    config = ModelConfig(**doc["config"])
    cls = {"tagger": TaggerModel, "classifier": PolarityModel}.get(doc["kind"])
    if cls is None:
        raise ConfigurationError(f"unknown model kind {doc['kind']!r}")
    model = cls(features, config)
    if model.input_dim != doc["input_dim"]:
        raise ShapeError(f"features give input width {model.input_dim}, model was trained with {doc['input_dim']}")
    assign_params(model.parameters(), load_params(os.path.join(directory, PARAMS_NAME)))
    return model
