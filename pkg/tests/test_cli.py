import hashlib
import json
import math
import subprocess
import sys

import pytest

from colloc_hlta.bow import read_matrix
from colloc_hlta.cli import build_parser, main
from colloc_hlta.coherence import topic_coherence
from colloc_hlta.ltm import read_model
from colloc_hlta.pipeline import PipelineConfig, read_config_file


@pytest.fixture(scope="module")
def mini(tmp_path_factory):
    d = tmp_path_factory.mktemp("mini")
    assert main(["gen-testcorpus", "--out", str(d), "--seed", "0"]) == 0
    return d


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    d = tmp_path_factory.mktemp("small")
    assert main(["gen-testcorpus", "--out", str(d), "--seed", "1", "--n-docs", "150"]) == 0
    return d


def summary(out):
    lines = (out / "summary.txt").read_text().splitlines()
    head = dict(line.split("\t") for line in lines[:3])
    return int(head["collocations"]), [line.split("\t")[1] for line in lines[3:]]


def vocab_tokens(out):
    return [line.split("\t")[0] for line in (out / "vocab.tsv").read_text().splitlines()]


def test_gen_testcorpus_outputs(mini):
    manifest = json.loads((mini / "manifest.json").read_text())
    lines = (mini / "corpus.jsonl").read_text().splitlines()
    assert len(lines) == manifest["n_docs"] == 500
    assert manifest["always_adjacent_bigram"] == "monte-carlo"
    assert "deep-neural-network" in manifest["expected_r2_trigrams"]


def test_preprocess_r0_has_no_collocations(mini, tmp_path):
    out = tmp_path / "r0"
    assert main(["preprocess", "--input", str(mini / "corpus.jsonl"), "--out", str(out), "--rounds", "0", "--vocab-size", "250"]) == 0
    count, colls = summary(out)
    assert count == 0 and colls == []
    assert all("-" not in t for t in vocab_tokens(out))


def test_preprocess_r1_recovers_planted_bigrams(mini, tmp_path):
    manifest = json.loads((mini / "manifest.json").read_text())
    out = tmp_path / "r1"
    assert main(["preprocess", "--input", str(mini / "corpus.jsonl"), "--out", str(out), "--vocab-size", "250"]) == 0
    count, colls = summary(out)
    assert sorted(colls) == manifest["expected_r1_collocations"]
    assert count == len(manifest["expected_r1_collocations"])
    m = read_matrix(out / "matrix.txt")
    assert list(m.tokens) == vocab_tokens(out)


def test_preprocess_r2_finds_trigram(mini, tmp_path):
    out = tmp_path / "r2"
    assert main(["preprocess", "--input", str(mini / "corpus.jsonl"), "--out", str(out), "--vocab-size", "250", "--rounds", "2"]) == 0
    tokens = vocab_tokens(out)
    assert "deep-neural-network" in tokens
    assert all(t.count("-") + 1 <= 4 for t in tokens)


def test_ttest_baseline(mini, tmp_path):
    out = tmp_path / "tt"
    args = ["preprocess", "--input", str(mini / "corpus.jsonl"), "--out", str(out), "--baseline", "ttest", "--baseline-n", "20", "--vocab-size", "250"]
    assert main(args) == 0
    _, colls = summary(out)
    assert "monte-carlo" in colls
    assert "baseline=ttest" in (out / "config.txt").read_text()


def test_learn_topics_coherence_chain(small, tmp_path):
    out = tmp_path / "chain"
    common = ["--out", str(out), "--strict-repro"]
    assert main(["preprocess", "--input", str(small / "corpus.jsonl"), "--vocab-size", "80", *common]) == 0
    assert main(["learn", *common]) == 0
    model = read_model(out / "model.json")
    assert len(model.word_ids) == 80
    assert (out / "learn.log").read_text().startswith("level 1:")
    first = (out / "model.json").read_bytes()
    assert main(["learn", *common]) == 0
    assert (out / "model.json").read_bytes() == first

    assert main(["topics", *common]) == 0
    for line in (out / "topics.txt").read_text().splitlines():
        assert len(line.split("\t")[2].split()) <= 7
    mem = (out / "memberships.txt").read_text().splitlines()
    assert len(mem) == 151 and mem[0].split("\t")[1:] == model.latent_ids

    assert main(["coherence", *common]) == 0
    matrix = read_matrix(out / "matrix.txt")
    topics = {}
    for line in (out / "topics.txt").read_text().splitlines():
        _, zid, words = line.split("\t")
        topics[zid.lstrip("+")] = [w.split(":")[0] for w in words.split()]
    scores = []
    for line in (out / "coherence.txt").read_text().splitlines()[:-1]:
        zid, score, status = line.split("\t")
        if status == "included":
            want = topic_coherence(topics[zid], matrix)
            assert float(score) == pytest.approx(want, abs=5e-7)
            scores.append(want)
        else:
            assert len(topics[zid]) < 4
    avg_line = (out / "coherence.txt").read_text().splitlines()[-1].split("\t")
    assert avg_line[0] == "AVERAGE" and int(avg_line[2]) == len(scores)
    assert float(avg_line[1]) == pytest.approx(math.fsum(scores) / len(scores), abs=5e-7)


def test_two_token_corpus_single_root(tmp_path):
    src = tmp_path / "two.jsonl"
    docs = [{"id": f"d{i}", "text": ["alpha beta", "alpha", "beta", "alpha beta gamma"][i % 4]} for i in range(40)]
    src.write_text("".join(json.dumps(d) + "\n" for d in docs))
    out = tmp_path / "o"
    assert main(["pipeline", "--input", str(src), "--out", str(out), "--vocab-size", "2", "--rounds", "0"]) == 0
    model = read_model(out / "model.json")
    assert model.latent_ids == [model.root] and sorted(model.word_ids) == ["alpha", "beta"]


def test_pipeline_r1_and_r0_reports(small, tmp_path):
    reports = {}
    for r in (0, 1):
        out = tmp_path / f"p{r}"
        assert main(["pipeline", "--input", str(small / "corpus.jsonl"), "--out", str(out), "--vocab-size", "80", "--rounds", str(r)]) == 0
        reports[r] = (out / "coherence.txt").read_text().splitlines()[-1]
    assert all(rep.startswith("AVERAGE\t") for rep in reports.values())


def digest(path):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(path.iterdir())}


def test_rerun_into_fresh_directory_and_inputs_untouched(small, tmp_path):
    before = digest(small)
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["pipeline", "--input", str(small / "corpus.jsonl"), "--out", str(out), "--vocab-size", "60", "--threads", "4"]) == 0
        outs.append(digest(out))
    assert digest(small) == before
    a, b = outs
    assert a.keys() == b.keys()
    assert all(a[k] == b[k] for k in a if k != "config.txt")


def test_config_precedence(small, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# test config\ninput={small / 'corpus.jsonl'}\nvocab_size=40\nrounds=0\nseed=9\n")
    out = tmp_path / "o"
    assert main(["preprocess", "--config", str(cfg), "--out", str(out), "--vocab-size", "30"]) == 0
    echo = read_config_file(out / "config.txt")
    assert echo["vocab_size"] == 30  # flag beats file
    assert echo["rounds"] == 0 and echo["seed"] == 9  # file beats default
    assert echo["em_restarts"] == PipelineConfig().em_restarts  # default
    assert len(vocab_tokens(out)) <= 30


def test_bad_config_and_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("vocab_size=10\nnonsense=1\n")
    assert main(["preprocess", "--config", str(cfg)]) == 1
    assert "bad.cfg:2" in capsys.readouterr().err
    assert main(["pipeline", "--input", str(tmp_path / "missing.jsonl"), "--out", str(tmp_path / "o")]) == 1
    assert main(["learn", "--out", str(tmp_path / "empty")]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["pipeline", "--no-such-flag"])
    assert exc.value.code != 0
    assert main(["preprocess", "--vocab-size", "0", "--input", "x"]) == 1
    assert "vocab_size" in capsys.readouterr().err


def test_help_documents_every_flag(capsys):
    parser = build_parser()
    sub = next(a for a in parser._actions if a.__class__.__name__ == "_SubParsersAction")
    assert set(sub.choices) == {"preprocess", "learn", "topics", "coherence", "pipeline", "gen-testcorpus"}
    for name, p in sub.choices.items():
        text = p.format_help()
        for action in p._actions:
            for opt in action.option_strings:
                assert opt in text
            if action.option_strings and action.dest != "help":
                assert action.help, f"{name} {action.option_strings} has no help text"


def test_console_script_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "colloc_hlta.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "gen-testcorpus" in res.stdout
