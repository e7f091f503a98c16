"""Command-line entry point: ``absa <subcommand> ...``.

Exit codes: 0 success, 1 usage/configuration error, 2 data error,
3 numeric failure (non-finite values during training).
"""

import argparse
import json
import logging
import os
import sys

from . import evaluation, synthetic
from .corpus import drop_counts, fallback_pos_tags, ingest, parse_record
from .embeddings import load_embeddings, save_embeddings
from .errors import AbsaError, ConfigurationError, FormatError, NumericError
from .features import FeatureSpace, PosTagSet, SenticLexicon
from .models import (
    ModelConfig, PolarityModel, TaggerModel, aspect_instances, extract_opinions, load_model,
    read_manifest, save_model, train_classifier, train_tagger,
)
from .nn.serialize import atomic_write_text
from .retrofit import DEFAULT_ITERATIONS, load_graph, retrofit

log = logging.getLogger("absa")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_resources(p, corpus=True):
    if corpus:
        p.add_argument("--corpus", required=True, help="JSONL corpus")
    p.add_argument("--embeddings", required=True, help="word-vector text file")
    p.add_argument("--sentic", help="sentic lexicon TSV (word + 5 values)")
    p.add_argument("--pos-tags", help="POS tag set, one tag per line (default: 45 Penn tags)")
    p.add_argument("--no-sentic", action="store_true", help="disable the sentic channel")
    p.add_argument("--no-pos", action="store_true", help="disable the POS channel")
    p.add_argument("--retrofit-graph", help="retrofit embeddings to this synonym graph before use")
    p.add_argument("--retrofit-iterations", type=int, default=DEFAULT_ITERATIONS)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="absa", description="Aspect-based sentiment analysis with bidirectional GRUs")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("retrofit", help="retrofit word vectors to a synonym graph")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)

    for name, epochs in (("train-tagger", 5), ("train-classifier", 10)):
        p = sub.add_parser(name, help=f"train the {name.split('-')[1]}")
        _add_resources(p)
        p.add_argument("--epochs", type=int, default=epochs)
        p.add_argument("--out", required=True, help="model directory")

    p = sub.add_parser("extract", help="extract (aspect, polarity) pairs")
    p.add_argument("--tagger", required=True, help="tagger model directory")
    p.add_argument("--classifier", required=True, help="classifier model directory")
    p.add_argument("--input", required=True, help="JSONL records or plain text (see --format)")
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=("jsonl", "text"), default="jsonl")

    p = sub.add_parser("eval-cv", help="k-fold cross-validation of both models")
    _add_resources(p)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--tagger-epochs", type=int, default=5)
    p.add_argument("--classifier-epochs", type=int, default=10)
    p.add_argument("--report", required=True, help="machine-readable JSON report")
    p.add_argument("--text-report", help="human-readable report (default: stdout)")
    p.add_argument("--model-dir", help="also save every fold's models here")

    p = sub.add_parser("synth", help="write the synthetic corpus and resources")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=synthetic.DEFAULT_SEED)
    return parser


def _resources(args):
    vocab, table = load_embeddings(args.embeddings)
    if args.retrofit_graph:
        table = retrofit(table, load_graph(args.retrofit_graph, vocab), args.retrofit_iterations)
    sentic = None
    if not args.no_sentic:
        if not args.sentic:
            raise ConfigurationError("--sentic is required unless --no-sentic is given")
        sentic = SenticLexicon.load(args.sentic, vocab)
    tagset = None if args.no_pos else (PosTagSet.load(args.pos_tags) if args.pos_tags else PosTagSet())
    return FeatureSpace(table, sentic, tagset, use_sentic=not args.no_sentic, use_pos=not args.no_pos)


def _resource_manifest(args):
    keys = ("embeddings", "sentic", "pos_tags", "no_sentic", "no_pos", "retrofit_graph", "retrofit_iterations")
    return {k: getattr(args, k) for k in keys}


def _features_from_manifest(doc):
    ns = argparse.Namespace(**doc["resources"])
    return _resources(ns)


def _load_corpus(path):
    records = ingest(path)
    counts = drop_counts(records)
    summary = ", ".join(f"{n} {reason}" for reason, n in sorted(counts.items())) or "none"
    print(f"{path}: {len(records)} sentences, dropped annotations: {summary}", file=sys.stderr)
    return records, counts


def cmd_retrofit(args):
    vocab, table = load_embeddings(args.embeddings)
    graph = load_graph(args.graph, vocab)
    save_embeddings(args.out, retrofit(table, graph, args.iterations))
    print(f"retrofitted {len(graph.edges)} of {len(vocab)} words over {args.iterations} sweeps", file=sys.stderr)


def cmd_train(args):
    features = _resources(args)
    records, counts = _load_corpus(args.corpus)
    config = ModelConfig(seed=args.seed)
    if args.command == "train-tagger":
        model = TaggerModel(features, config)
        trace = train_tagger(model, records, args.epochs)
    else:
        model = PolarityModel(features, config)
        trace = train_classifier(model, aspect_instances(records), args.epochs)
    extra = {"resources": _resource_manifest(args), "corpus": args.corpus,
             "dropped_annotations": dict(sorted(counts.items())), "epochs_requested": args.epochs}
    save_model(model, args.out, trace, extra)
    print(f"trained {model.kind}: final epoch loss {trace.epoch_loss[-1]:.6f}", file=sys.stderr)


def _read_sentences(path, fmt):
    sentences = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            if fmt == "text":
                obj = {"text": line.rstrip("\n"), "id": str(lineno)}
                sentences.append(parse_record(obj, path, lineno, tagger=fallback_pos_tags))
            else:
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as e:
                    raise FormatError(f"invalid JSON: {e.msg}", path, lineno) from None
                sentences.append(parse_record(obj, path, lineno, tagger=fallback_pos_tags))
    return sentences


def cmd_extract(args):
    tagger = load_model(args.tagger, _features_from_manifest(read_manifest(args.tagger)))
    classifier = load_model(args.classifier, _features_from_manifest(read_manifest(args.classifier)))
    out = []
    for s in _read_sentences(args.input, args.format):
        opinions = []
        for span, label in extract_opinions(tagger, classifier, s):
            b, e = s.char_span(span)
            opinions.append({"term": s.text[b:e], "from": b, "to": e, "token_start": span[0],
                             "token_end": span[1], "polarity": label})
        out.append(json.dumps({"id": s.id, "text": s.text, "opinions": opinions}, ensure_ascii=False,
                              sort_keys=True) + "\n")
    atomic_write_text(args.output, "".join(out))


def cmd_eval_cv(args):
    records, counts = _load_corpus(args.corpus)
    tagger_features = _resources(args)
    classifier_features = tagger_features
    config = evaluation.TrainConfig(args.tagger_epochs, args.classifier_epochs, args.seed, ModelConfig(seed=args.seed))

    def on_fold(fold, tagger, classifier, traces):
        if args.model_dir:
            base = os.path.join(args.model_dir, f"fold-{fold}")
            extra = {"resources": _resource_manifest(args), "fold": fold}
            save_model(tagger, os.path.join(base, "tagger"), traces[0], extra)
            save_model(classifier, os.path.join(base, "classifier"), traces[1], extra)

    report = evaluation.cross_validate(records, args.k, tagger_features, classifier_features, config, on_fold)
    report["dropped_annotations"] = dict(sorted(counts.items()))
    report["config"] = {"tagger_epochs": args.tagger_epochs, "classifier_epochs": args.classifier_epochs,
                        "resources": _resource_manifest(args), "corpus": args.corpus}
    atomic_write_text(args.report, evaluation.dumps_report(report))
    text = evaluation.format_report(report)
    if args.text_report:
        atomic_write_text(args.text_report, text)
    else:
        sys.stdout.write(text)


def cmd_synth(args):
    paths = synthetic.write_resources(args.out, args.n, args.seed)
    for name in synthetic.FILES:
        print(paths[name])


COMMANDS = {
    "retrofit": cmd_retrofit, "train-tagger": cmd_train, "train-classifier": cmd_train,
    "extract": cmd_extract, "eval-cv": cmd_eval_cv, "synth": cmd_synth,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except NumericError as e:
        print(f"absa: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigurationError as e:
        print(f"absa: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (AbsaError, OSError, KeyError) as e:
        print(f"absa: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
