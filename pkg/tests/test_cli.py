import json
import subprocess
import sys

import pytest

from absa.cli import main
from absa.synthetic import FILES, packaged_path

P = packaged_path
RES = ["--embeddings", P("embeddings.txt"), "--sentic", P("sentic.tsv"), "--pos-tags", P("postags.txt")]


@pytest.fixture(scope="module")
def models(tmp_path_factory):
    d = tmp_path_factory.mktemp("models")
    assert main(["train-tagger", "--corpus", P("corpus.jsonl"), *RES, "--epochs", "2", "--out", str(d / "t")]) == 0
    assert main(["train-classifier", "--corpus", P("corpus.jsonl"), *RES, "--epochs", "5", "--out", str(d / "c")]) == 0
    return d


def test_packaged_data_regenerates(tmp_path):
    assert main(["synth", "--out", str(tmp_path)]) == 0
    for name in FILES:
        assert (tmp_path / name).read_bytes() == open(P(name), "rb").read(), name


def test_retrofit_empty_graph_is_identity(tmp_path):
    graph = tmp_path / "g.txt"
    graph.write_text("")
    out = tmp_path / "out.txt"
    assert main(["retrofit", "--embeddings", P("embeddings.txt"), "--graph", str(graph), "--out", str(out)]) == 0
    assert out.read_bytes() == open(P("embeddings.txt"), "rb").read()


def test_retrofit_changes_graph_words(tmp_path):
    out = tmp_path / "out.txt"
    assert main(["retrofit", "--embeddings", P("embeddings.txt"), "--graph", P("synonyms.txt"), "--out", str(out)]) == 0
    assert out.read_bytes() != open(P("embeddings.txt"), "rb").read()


def test_manifest_records_training(models):
    doc = json.loads((models / "t" / "manifest.json").read_text())
    assert doc["kind"] == "tagger" and doc["input_dim"] == 150
    assert len(doc["trace"]["epoch_loss"]) == 2
    assert doc["resources"]["sentic"] == P("sentic.tsv")


def test_extract_jsonl_and_text(models, tmp_path):
    inp = tmp_path / "in.txt"
    inp.write_text("The sake menu was great .\nthe staff was rude\n")
    out = tmp_path / "out.jsonl"
    args = ["extract", "--tagger", str(models / "t"), "--classifier", str(models / "c"), "--output", str(out)]
    assert main(args + ["--input", str(inp), "--format", "text"]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 2
    for r in rows:
        for o in r["opinions"]:
            assert r["text"][o["from"]:o["to"]] == o["term"] and o["polarity"] in ("positive", "negative")
    assert main(args + ["--input", P("corpus.jsonl")]) == 0
    assert len(out.read_text().splitlines()) == 100


def test_extract_empty_input(models, tmp_path):
    (tmp_path / "empty.jsonl").write_text("")
    out = tmp_path / "o.jsonl"
    assert main(["extract", "--tagger", str(models / "t"), "--classifier", str(models / "c"),
                 "--input", str(tmp_path / "empty.jsonl"), "--output", str(out)]) == 0
    assert out.read_text() == ""


def test_eval_cv_report(tmp_path):
    rep, txt = tmp_path / "r.json", tmp_path / "r.txt"
    rc = main(["eval-cv", "--corpus", P("corpus.jsonl"), *RES, "--k", "5", "--tagger-epochs", "1",
               "--classifier-epochs", "2", "--report", str(rep), "--text-report", str(txt),
               "--model-dir", str(tmp_path / "m")])
    assert rc == 0
    doc = json.loads(rep.read_text())
    assert len(doc["folds"]) == 5 and {"precision", "recall", "f1", "accuracy_isolated"} <= set(doc["mean"])
    assert len(txt.read_text().splitlines()) == 7
    assert (tmp_path / "m" / "fold-4" / "classifier" / "params.json").exists()


@pytest.mark.parametrize("argv", [[], ["bogus"], ["train-tagger", "--corpus", "x"],
                                  ["eval-cv", "--corpus", P("corpus.jsonl"), *RES, "--k", "1", "--report", "r"]])
def test_usage_errors_exit_1(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as e:
        sys.exit(main(argv))
    assert e.value.code == 1


def test_data_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{nope\n")
    out = str(tmp_path / "m")
    assert main(["train-tagger", "--corpus", str(bad), *RES, "--out", out]) == 2
    assert main(["train-tagger", "--corpus", str(tmp_path / "missing"), *RES, "--out", out]) == 2


def test_nonfinite_training_exit_3(tmp_path):
    first = json.loads(open(P("corpus.jsonl")).readline())["text"].split()[0].lower()
    lex = tmp_path / "sentic.tsv"
    lex.write_text(f"{first}\tinf\t0\t0\t0\t0\n")
    with pytest.warns(RuntimeWarning):
        rc = main(["train-tagger", "--corpus", P("corpus.jsonl"), "--embeddings", P("embeddings.txt"),
                   "--sentic", str(lex), "--epochs", "1", "--out", str(tmp_path / "m")])
    assert rc == 3
    assert not (tmp_path / "m" / "params.json").exists()


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "absa.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "eval-cv" in r.stdout
