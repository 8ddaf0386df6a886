"""End-to-end pipeline: preprocess -> learn -> topics -> coherence.

Every stage has an in-memory form (``fit_*``) and a file-writing form
(``cmd_*``) that reads and writes the formats documented in each module.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import coherence as coh
from .bow import DocTermMatrix, build_binary_bow, read_matrix, write_matrix
from .colloc import PreprocessParams, Vocabulary, compute_token_stats, preprocess, replace_pairs, select_top_p, tfidf_scores, ttest_bigrams, write_vocabulary
from .corpus import Corpus, NormalizationConfig, RawDocument, default_stopwords, load_corpus, plural_stripper, read_stopwords, tokenize_corpus, write_jsonl
from .hlta import LearnParams, learn_hierarchy
from .ltm import LatentTreeModel, extract_topics, read_model, write_model
from .topics import compute_memberships, render_hierarchy, write_memberships

__all__ = [
    "PipelineConfig",
    "PipelineResult",
    "read_config_file",
    "fit_preprocess",
    "fit_pipeline",
    "cmd_preprocess",
    "cmd_learn",
    "cmd_topics",
    "cmd_coherence",
    "cmd_pipeline",
    "cmd_gen_testcorpus",
]

VOCAB_FILE = "vocab.tsv"
CORPUS_FILE = "corpus.jsonl"
MATRIX_FILE = "matrix.txt"
SUMMARY_FILE = "summary.txt"
MODEL_FILE = "model.json"
LEARN_LOG = "learn.log"
TOPICS_FILE = "topics.txt"
MEMBERSHIP_FILE = "memberships.txt"
COHERENCE_FILE = "coherence.txt"
CONFIG_ECHO = "config.txt"


@dataclass
class PipelineConfig:
    input: str | None = None
    format: str = "jsonl"
    out: str = "out"
    vocab_size: int = 5000
    rounds: int = 1
    baseline: str = "none"
    baseline_n: int = 1000
    min_token_length: int = 3
    stopwords: str | None = None
    strip_plurals: bool = False
    max_island_size: int = 7
    em_restarts: int = 4
    em_max_iters: int = 200
    em_tol: float = 1e-4
    top_level_max_vars: int = 15
    coherence_m: int = 4
    coherence_log: bool = True
    mi_basis: str = "model"
    seed: int = 0
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    strict_repro: bool = False

    def __post_init__(self):
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be >= 1")
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")
        if self.baseline not in ("none", "ttest"):
            raise ValueError("baseline must be 'none' or 'ttest'")
        if self.mi_basis not in ("model", "empirical"):
            raise ValueError("mi_basis must be 'model' or 'empirical'")

    @property
    def effective_threads(self) -> int:
        return 1 if self.strict_repro else max(1, int(self.threads))

    def learn_params(self) -> LearnParams:
        return LearnParams(
            max_island_size=self.max_island_size,
            em_restarts=self.em_restarts,
            em_max_iters=self.em_max_iters,
            em_tol=self.em_tol,
            top_level_max_vars=self.top_level_max_vars,
            seed=self.seed,
        )

    def normalization(self, raw_docs=None) -> NormalizationConfig:
        stop = read_stopwords(self.stopwords) if self.stopwords else default_stopwords()
        hook = plural_stripper(raw_docs) if self.strip_plurals and raw_docs is not None else None
        return NormalizationConfig(self.min_token_length, stop, hook)

    def to_text(self) -> str:
        # thread count is machine-dependent and does not affect results
        skip = {"threads"}
        return "".join(f"{f.name}={_fmt(getattr(self, f.name))}\n" for f in dataclasses.fields(self) if f.name not in skip)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _coerce(name: str, raw: str):
    ftype = {f.name: f for f in dataclasses.fields(PipelineConfig)}[name].type
    raw = raw.strip()
    if "bool" in ftype:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{name}: expected a boolean, got {raw!r}")
    if "None" in ftype and raw == "":
        return None
    if ftype.startswith("int"):
        return int(raw)
    if ftype.startswith("float"):
        return float(raw)
    return raw


def read_config_file(path) -> dict:
    """Parse a flat ``key=value`` file (``#`` comments, blank lines ignored)."""
    names = {f.name for f in dataclasses.fields(PipelineConfig)}
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in names:
                raise ValueError(f"{path}:{lineno}: unknown or malformed setting {line!r}")
            out[key] = _coerce(key, value)
    return out


@dataclass
class PipelineResult:
    corpus: Corpus
    vocab: Vocabulary
    matrix: DocTermMatrix
    model: LatentTreeModel | None = None
    topics: list = field(default_factory=list)
    report: coh.CoherenceReport | None = None
    learn_log: list = field(default_factory=list)
    history: list = field(default_factory=list)


def fit_preprocess(raw_docs: list[RawDocument], cfg: PipelineConfig) -> tuple[Corpus, Vocabulary, DocTermMatrix]:
    corpus = tokenize_corpus(raw_docs, cfg.normalization(raw_docs), cfg.effective_threads)
    if cfg.baseline == "ttest":
        rewritten = replace_pairs(corpus, frozenset(ttest_bigrams(corpus, cfg.baseline_n)))
        vocab = select_top_p(tfidf_scores(compute_token_stats(rewritten)), cfg.vocab_size)
    else:
        rewritten, vocab = preprocess(corpus, PreprocessParams(cfg.rounds, cfg.vocab_size), cfg.effective_threads)
    return rewritten, vocab, build_binary_bow(rewritten, vocab)


def fit_pipeline(raw_docs: list[RawDocument], cfg: PipelineConfig) -> PipelineResult:
    corpus, vocab, matrix = fit_preprocess(raw_docs, cfg)
    res = PipelineResult(corpus, vocab, matrix)
    res.model = learn_hierarchy(matrix, cfg.learn_params(), cfg.effective_threads, res.history, res.learn_log)
    res.topics = extract_topics(res.model, basis=cfg.mi_basis, matrix=matrix)
    res.report = coh.average_coherence(res.topics, matrix, cfg.coherence_m, cfg.coherence_log)
    return res


def _out(cfg: PipelineConfig) -> Path:
    p = Path(cfg.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_preprocess(out: Path, cfg, corpus, vocab, matrix) -> None:
    write_vocabulary(out / VOCAB_FILE, vocab)
    write_jsonl(out / CORPUS_FILE, (RawDocument(d.id, " ".join(d.tokens)) for d in corpus.docs))
    write_matrix(out / MATRIX_FILE, matrix)
    colls = vocab.collocations()
    with open(out / SUMMARY_FILE, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"documents\t{corpus.N}\n")
        fh.write(f"vocabulary\t{len(vocab)}\n")
        fh.write(f"collocations\t{len(colls)}\n")
        for t in colls:
            fh.write(f"collocation\t{t}\n")


def _echo_config(out: Path, cfg: PipelineConfig) -> None:
    (out / CONFIG_ECHO).write_text(cfg.to_text(), encoding="utf-8")


def _load_raw(cfg: PipelineConfig) -> list[RawDocument]:
    if not cfg.input:
        raise ValueError("an input corpus path is required")
    return load_corpus(cfg.input, cfg.format)


def cmd_preprocess(cfg: PipelineConfig) -> Path:
    out = _out(cfg)
    corpus, vocab, matrix = fit_preprocess(_load_raw(cfg), cfg)
    _write_preprocess(out, cfg, corpus, vocab, matrix)
    _echo_config(out, cfg)
    return out


def _matrix_path(cfg, matrix_path):
    return Path(matrix_path) if matrix_path else Path(cfg.out) / MATRIX_FILE


def cmd_learn(cfg: PipelineConfig, matrix_path=None) -> Path:
    matrix = read_matrix(_matrix_path(cfg, matrix_path))
    out = _out(cfg)
    log: list[str] = []
    model = learn_hierarchy(matrix, cfg.learn_params(), cfg.effective_threads, log=log)
    write_model(out / MODEL_FILE, model)
    (out / LEARN_LOG).write_text("\n".join(log) + "\n", encoding="utf-8")
    _echo_config(out, cfg)
    return out


def _model_and_matrix(cfg, model_path, matrix_path):
    model = read_model(Path(model_path) if model_path else Path(cfg.out) / MODEL_FILE)
    return model, read_matrix(_matrix_path(cfg, matrix_path))


def _write_topics(out, model, matrix, topics):
    (out / TOPICS_FILE).write_text(render_hierarchy(model, topics).to_text(), encoding="utf-8")
    write_memberships(out / MEMBERSHIP_FILE, compute_memberships(model, matrix))


def cmd_topics(cfg: PipelineConfig, model_path=None, matrix_path=None) -> Path:
    model, matrix = _model_and_matrix(cfg, model_path, matrix_path)
    out = _out(cfg)
    _write_topics(out, model, matrix, extract_topics(model, basis=cfg.mi_basis, matrix=matrix))
    return out


def cmd_coherence(cfg: PipelineConfig, model_path=None, matrix_path=None) -> Path:
    model, matrix = _model_and_matrix(cfg, model_path, matrix_path)
    out = _out(cfg)
    topics = extract_topics(model, basis=cfg.mi_basis, matrix=matrix)
    coh.write_report(out / COHERENCE_FILE, coh.average_coherence(topics, matrix, cfg.coherence_m, cfg.coherence_log))
    return out


def cmd_pipeline(cfg: PipelineConfig) -> Path:
    out = _out(cfg)
    res = fit_pipeline(_load_raw(cfg), cfg)
    _write_preprocess(out, cfg, res.corpus, res.vocab, res.matrix)
    write_model(out / MODEL_FILE, res.model)
    (out / LEARN_LOG).write_text("\n".join(res.learn_log) + "\n", encoding="utf-8")
    _write_topics(out, res.model, res.matrix, res.topics)
    coh.write_report(out / COHERENCE_FILE, res.report)
    _echo_config(out, cfg)
    return out


def cmd_gen_testcorpus(out_dir, seed: int = 0, n_docs: int | None = None) -> Path:
    from .synthetic import SyntheticSpec, generate_corpus, write_manifest

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = SyntheticSpec() if n_docs is None else SyntheticSpec(n_docs=n_docs)
    docs, manifest = generate_corpus(seed, spec)
    write_jsonl(out / CORPUS_FILE, docs)
    write_manifest(out / "manifest.json", manifest)
    return out
