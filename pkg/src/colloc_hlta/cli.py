"""Command-line driver.

    colloc-hlta gen-testcorpus --out data/
    colloc-hlta pipeline --input data/corpus.jsonl --vocab-size 250 --out run/
    colloc-hlta preprocess | learn | topics | coherence ...

Settings resolve as command-line flags, then ``--config`` file, then defaults.
The effective configuration is written to ``<out>/config.txt``.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from . import pipeline as pl
from .pipeline import PipelineConfig

log = logging.getLogger("colloc_hlta")

_HELP = {
    "input": "input corpus: a jsonl file or a directory of .txt files",
    "format": "input format (jsonl or textdir)",
    "out": "output directory",
    "vocab_size": "vocabulary capacity P",
    "rounds": "number of concatenation rounds r (0 = individual words only)",
    "baseline": "collocation method: none (TF-IDF merging) or ttest (t-test bigrams)",
    "baseline_n": "number of t-test bigrams kept when --baseline ttest",
    "min_token_length": "drop tokens shorter than this",
    "stopwords": "stopword file, one word per line (default: bundled English list)",
    "strip_plurals": "strip a trailing -s when the singular form is attested",
    "max_island_size": "maximum number of variables grouped under one latent",
    "em_restarts": "EM random restarts per latent class model",
    "em_max_iters": "EM iteration cap",
    "em_tol": "EM stopping threshold on relative objective improvement",
    "top_level_max_vars": "stop adding levels once at most this many variables remain",
    "coherence_m": "number of top words scored by topic coherence",
    "coherence_log": "apply the logarithm in each coherence term",
    "mi_basis": "topic word ranking: model (model MI) or empirical (posterior vs data MI)",
    "seed": "random seed",
    "threads": "worker threads (results do not depend on this)",
    "strict_repro": "force single-threaded execution",
}

_CHOICES = {"format": ["jsonl", "textdir"], "baseline": ["none", "ttest"], "mi_basis": ["model", "empirical"]}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value configuration file")
    for f in dataclasses.fields(PipelineConfig):
        flag = "--" + f.name.replace("_", "-")
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        help_ = _HELP[f.name] if "(default" in _HELP[f.name] else f"{_HELP[f.name]} (default: {default})"
        if "bool" in f.type:
            p.add_argument(flag, action=argparse.BooleanOptionalAction, default=argparse.SUPPRESS, help=help_)
            continue
        conv = int if f.type.startswith("int") else float if f.type.startswith("float") else str
        p.add_argument(flag, type=conv, choices=_CHOICES.get(f.name), default=argparse.SUPPRESS, help=help_)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="colloc-hlta",
        description="Collocation extraction and hierarchical latent tree topic modeling.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="select vocabulary and collocations, write corpus and matrix")
    _add_config_flags(p)

    p = sub.add_parser("learn", help="learn a latent tree model from a document-term matrix")
    _add_config_flags(p)
    p.add_argument("--matrix", help="matrix file (default: <out>/matrix.txt)")

    for name, text in (("topics", "render the topic hierarchy and memberships"), ("coherence", "score topic coherence")):
        p = sub.add_parser(name, help=text)
        _add_config_flags(p)
        p.add_argument("--model", help="model file (default: <out>/model.json)")
        p.add_argument("--matrix", help="matrix file (default: <out>/matrix.txt)")

    p = sub.add_parser("pipeline", help="preprocess, learn, topics and coherence in one run")
    _add_config_flags(p)

    p = sub.add_parser("gen-testcorpus", help="write the seeded synthetic corpus and its manifest")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    p.add_argument("--n-docs", type=int, default=None, help="number of documents")
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(pl.read_config_file(args.config))
    for f in dataclasses.fields(PipelineConfig):
        if hasattr(args, f.name):
            values[f.name] = getattr(args, f.name)
    return PipelineConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.command == "gen-testcorpus":
            out = pl.cmd_gen_testcorpus(args.out, args.seed, args.n_docs)
        else:
            cfg = resolve_config(args)
            if args.command == "preprocess":
                out = pl.cmd_preprocess(cfg)
            elif args.command == "learn":
                out = pl.cmd_learn(cfg, args.matrix)
            elif args.command == "topics":
                out = pl.cmd_topics(cfg, args.model, args.matrix)
            elif args.command == "coherence":
                out = pl.cmd_coherence(cfg, args.model, args.matrix)
            else:
                out = pl.cmd_pipeline(cfg)
    except (OSError, ValueError) as exc:
        print(f"colloc-hlta: error: {exc}", file=sys.stderr)
        return 1
    log.info("wrote %s", out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
