"""Exact-match span metrics, polarity accuracy and k-fold cross-validation."""

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, EvaluationError
from .models import (
    ModelConfig, PolarityModel, TaggerModel, aspect_instances, classify_aspect, tag_sentence,
    train_classifier, train_tagger,
)


@dataclass(frozen=True)
class Annotation:
    begin: int
    end: int
    polarity: Optional[str] = None


def dedupe(annotations):
    """Collapse annotations with equal offsets and polarity, keeping first-seen order."""
    seen, out = set(), []
    for a in annotations:
        key = (a.begin, a.end, a.polarity)
        if key not in seen:
            seen.add(key)
            out.append(a)
    return out


@dataclass
class SpanMetrics:
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f1: float


def metrics_from_counts(tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return SpanMetrics(tp, fp, fn, p, r, f1)


def span_metrics(gold, predicted):
    """Exact-match P/R/F1 over ``(sentence_id, start, end)`` keys.

    With no predictions, precision is reported as 0.
    """
    gold, predicted = set(gold), set(predicted)
    tp = len(gold & predicted)
    return metrics_from_counts(tp, len(predicted) - tp, len(gold) - tp)


@dataclass
class Accuracy:
    value: Optional[float]
    count: int
    reason: Optional[str] = None


def polarity_accuracy(gold, predictions, mode="isolated"):
    """Fraction of evaluated spans whose predicted label equals the gold one.

    ``gold`` is an iterable of ``(key, label)`` pairs, where several labels
    may share a key; ``predictions`` maps key -> label.

    ``isolated``: predictions must cover exactly the gold keys.
    ``pipeline``: only gold keys that were also predicted (the true
    positives) are scored; with none the value is ``None`` with a reason.
    """
    gold = list(gold)
    gold_keys = {k for k, _ in gold}
    if mode == "isolated":
        missing = sorted(gold_keys - set(predictions))
        extra = sorted(set(predictions) - gold_keys)
        if missing or extra:
            raise EvaluationError(f"predictions do not cover the gold spans: missing {missing}, unexpected {extra}")
        scored = gold
    elif mode == "pipeline":
        scored = [(k, label) for k, label in gold if k in predictions]
    else:
        raise ConfigurationError(f"unknown accuracy mode {mode!r}")
    if not scored:
        return Accuracy(None, 0, "no correctly extracted aspect terms" if mode == "pipeline" else "no gold spans")
    correct = sum(predictions[k] == label for k, label in scored)
    return Accuracy(correct / len(scored), len(scored))


# cross-validation


def fold_assignment(n, k, seed=0):
    """Fold id per item: a seeded permutation dealt round-robin, so sizes differ by at most one."""
    if k < 2:
        raise ConfigurationError(f"k must be >= 2, got {k}")
    if n < k:
        raise ConfigurationError(f"corpus of {n} sentences is too small for {k} folds")
    folds = np.empty(n, dtype=int)
    folds[np.random.default_rng(seed).permutation(n)] = np.arange(n) % k
    return folds.tolist()


@dataclass
class TrainConfig:
    tagger_epochs: int = 5
    classifier_epochs: int = 10
    seed: int = 0
    model: ModelConfig = field(default_factory=ModelConfig)


def gold_spans(sentences):
    return {(s.id, *s.char_span(b)) for s in sentences for b in s.spans()}


def gold_labels(sentences):
    return [((s.id, *s.char_span(a)), a.polarity) for s in sentences for a in s.aspects]


def evaluate_fold(tagger, classifier, sentences):
    predicted, pipeline_pred, isolated_pred = set(), {}, {}
    for s in sentences:
        _, _, spans = tag_sentence(tagger, s)
        x = classifier.inputs(s) if len(s) else None
        for span in spans:
            key = (s.id, *s.char_span(span))
            predicted.add(key)
            pipeline_pred[key] = classify_aspect(classifier, s, span, x)[0]
        for b in s.spans():
            isolated_pred[(s.id, *s.char_span(b))] = classify_aspect(classifier, s, b, x)[0]
    gold = gold_labels(sentences)
    return {
        "span": span_metrics(gold_spans(sentences), predicted),
        "accuracy_isolated": polarity_accuracy(gold, isolated_pred, "isolated"),
        "accuracy_pipeline": polarity_accuracy(gold, pipeline_pred, "pipeline"),
    }


def _model_config(base, seed):
    return ModelConfig(**{**asdict(base), "seed": seed})


def cross_validate(sentences, k, tagger_features, classifier_features, config=None, on_fold=None):
    """Train and evaluate both models on each of ``k`` folds.

    ``on_fold(fold, tagger, classifier, traces)`` is called after each fold
    (used to persist fold models). Returns a JSON-ready report.
    """
    config = config or TrainConfig()
    sentences = list(sentences)
    ids = [s.id for s in sentences]
    if len(set(ids)) != len(ids):
        raise ConfigurationError("sentence ids must be unique for evaluation")
    folds = fold_assignment(len(sentences), k, config.seed)
    per_fold = []
    for f in range(k):
        train = [s for s, a in zip(sentences, folds) if a != f]
        test = [s for s, a in zip(sentences, folds) if a == f]
        mc = _model_config(config.model, config.seed + f)
        tagger = TaggerModel(tagger_features, mc)
        t_trace = train_tagger(tagger, train, config.tagger_epochs)
        classifier = PolarityModel(classifier_features, mc)
        instances = aspect_instances(train)
        c_trace = train_classifier(classifier, instances, config.classifier_epochs) if instances else None
        result = evaluate_fold(tagger, classifier, test)
        per_fold.append({
            "fold": f,
            "train_sentences": len(train),
            "test_sentences": len(test),
            "test_ids": [s.id for s in test],
            "span": asdict(result["span"]),
            "accuracy_isolated": asdict(result["accuracy_isolated"]),
            "accuracy_pipeline": asdict(result["accuracy_pipeline"]),
            "tagger_loss": t_trace.epoch_loss,
            "classifier_loss": c_trace.epoch_loss if c_trace else [],
        })
        if on_fold is not None:
            on_fold(f, tagger, classifier, (t_trace, c_trace))
    return {"k": k, "seed": config.seed, "folds": per_fold, "mean": _means(per_fold)}


def _mean_of(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def _means(per_fold):
    out = {m: _mean_of([f["span"][m] for f in per_fold]) for m in ("precision", "recall", "f1")}
    for key in ("accuracy_isolated", "accuracy_pipeline"):
        vals = [f[key]["value"] for f in per_fold]
        out[key] = _mean_of(vals)
        out[f"{key}_folds_scored"] = sum(v is not None for v in vals)
    return out


def dumps_report(report):
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def format_report(report):
    lines = [f"{report['k']}-fold cross-validation (seed {report['seed']})"]
    fmt = lambda v: "n/a" if v is None else f"{v:.4f}"  # noqa: E731
    for f in report["folds"]:
        s = f["span"]
        lines.append(
            f"fold {f['fold']}: P={fmt(s['precision'])} R={fmt(s['recall'])} F1={fmt(s['f1'])} "
            f"acc(isolated)={fmt(f['accuracy_isolated']['value'])} "
            f"acc(pipeline)={fmt(f['accuracy_pipeline']['value'])}")
    m = report["mean"]
    lines.append(
        f"mean:   P={fmt(m['precision'])} R={fmt(m['recall'])} F1={fmt(m['f1'])} "
        f"acc(isolated)={fmt(m['accuracy_isolated'])} acc(pipeline)={fmt(m['accuracy_pipeline'])}")
    return "\n".join(lines) + "\n"
