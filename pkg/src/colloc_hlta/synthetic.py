"""Seeded synthetic corpus with planted collocations and a ground-truth manifest.

Documents are drawn from a few themes.  Every theme owns a set of content
words and a planted phrase built on the shared word ``network`` (``social
network``, ``neural network``, ...), so the shared word is ambiguous unless
the phrases are merged.  The neural theme also plants the trigram ``deep
neural network``.  ``monte carlo`` is planted across all themes, and its two
words never occur apart.  Filler words follow a Zipf law over pseudo-words.
Raw text includes stopwords, capitals and punctuation so that the tokenizer
is exercised too.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .corpus import RawDocument

__all__ = ["SyntheticSpec", "THEMES", "generate_corpus", "manifest_for"]

SHARED_WORD = "network"
ADJACENT_PHRASE = "monte carlo"

THEMES: dict[str, dict] = {
    "social": {
        "phrases": ["social network"],
        "words": "friend community follower influence profile twitter facebook sharing viral tie clique homophily".split(),
    },
    "neural": {
        "phrases": ["neural network", "deep neural network", "deep learning"],
        "words": "layer neuron activation gradient backpropagation convolution pooling dropout relu epoch weight tensor".split(),
    },
    "bayesian": {
        "phrases": ["bayesian network", "graphical model"],
        "words": "prior posterior belief likelihood conditional causal dag evidence marginal conjugate inference dirichlet".split(),
    },
    "sensor": {
        "phrases": ["sensor network"],
        "words": "wireless battery energy routing signal antenna deployment coverage latency packet mote hop".split(),
    },
    "language": {
        "phrases": ["language model"],
        "words": "sentence word grammar parser syntax corpus translation lexicon morphology token vocabulary perplexity".split(),
    },
    "reinforcement": {
        "phrases": ["reinforcement learning"],
        "words": "reward agent policy action bellman exploration episode robot environment discount trajectory bandit".split(),
    },
}

_ONSETS = "b c d f g h j k l m n p r s t v z".split()
_VOWELS = "a e i o u".split()
_STOP_SPRINKLE = ["the", "of", "and", "in", "to", "is", "for", "with", "on", "by"]


def _pseudo_words(n: int) -> list[str]:
    """``n`` fixed pseudo-words (three syllables, so always >= 6 characters)."""
    sylls = [o + v for o, v in itertools.product(_ONSETS, _VOWELS)]
    rng = np.random.default_rng(12345)
    words, seen = [], set()
    reserved = {w for t in THEMES.values() for w in t["words"]}
    while len(words) < n:
        w = "".join(sylls[i] for i in rng.integers(0, len(sylls), 3))
        if w not in seen and w not in reserved:
            seen.add(w)
            words.append(w)
    return words


@dataclass(frozen=True)
class SyntheticSpec:
    n_docs: int = 500
    doc_length: tuple[int, int] = (30, 60)
    theme_word_share: float = 0.75
    theme_tail: int = 40
    theme_zipf: float = 0.5
    n_background: int = 40
    phrase_doc_prob: float = 0.8
    phrase_rate: float = 1.5
    secondary_doc_prob: float = 0.8
    adjacent_doc_prob: float = 0.5
    themes: tuple[str, ...] = field(default=tuple(THEMES))


def _insert(tokens: list[str], phrase: list[str], rng) -> None:
    pos = int(rng.integers(0, len(tokens) + 1))
    tokens[pos:pos] = phrase


def _render(tokens: list[str], rng) -> str:
    out = []
    for t in tokens:
        if rng.random() < 0.15:
            out.append(str(rng.choice(_STOP_SPRINKLE)))
        out.append(t.capitalize() if rng.random() < 0.05 else t)
        if rng.random() < 0.08:
            out[-1] += str(rng.choice([",", ".", ";"]))
    return " ".join(out)


def _zipf(n: int, s: float) -> np.ndarray:
    w = np.arange(1, n + 1, dtype=float) ** -s
    return w / w.sum()


def theme_vocabularies(spec: SyntheticSpec) -> dict[str, list[str]]:
    """Named words first, then ``theme_tail`` pseudo-words per theme."""
    pseudo = _pseudo_words(spec.theme_tail * len(spec.themes) + spec.n_background)
    vocab = {}
    for i, t in enumerate(spec.themes):
        vocab[t] = THEMES[t]["words"] + pseudo[i * spec.theme_tail : (i + 1) * spec.theme_tail]
    vocab["_background"] = pseudo[len(spec.themes) * spec.theme_tail :]
    return vocab


def generate_corpus(seed: int = 0, spec: SyntheticSpec | None = None) -> tuple[list[RawDocument], dict]:
    """Generate raw documents and a manifest describing the planted truth."""
    spec = spec or SyntheticSpec()
    rng = np.random.default_rng(seed)
    vocab = theme_vocabularies(spec)
    background = vocab["_background"]

    docs, themes_of = [], []
    for d in range(spec.n_docs):
        theme = spec.themes[int(rng.integers(0, len(spec.themes)))]
        words = vocab[theme]
        p_theme = _zipf(len(words), spec.theme_zipf)
        length = int(rng.integers(spec.doc_length[0], spec.doc_length[1] + 1))
        is_theme = rng.random(length) < spec.theme_word_share
        tokens = [
            words[int(rng.choice(len(words), p=p_theme))] if it else background[int(rng.integers(0, len(background)))]
            for it in is_theme
        ]
        for k, phrase in enumerate(THEMES[theme]["phrases"]):
            if k == 0 and rng.random() < spec.phrase_doc_prob:
                for _ in range(1 + int(rng.poisson(spec.phrase_rate - 1))):
                    _insert(tokens, phrase.split(), rng)
            elif k > 0 and rng.random() < spec.secondary_doc_prob:
                _insert(tokens, phrase.split(), rng)
        if rng.random() < spec.adjacent_doc_prob:
            _insert(tokens, ADJACENT_PHRASE.split(), rng)
        docs.append(RawDocument(f"doc{d:05d}", _render(tokens, rng)))
        themes_of.append(theme)
    return docs, manifest_for(seed, spec, themes_of)


def _sub_bigrams(phrase: str) -> list[str]:
    w = phrase.split()
    return ["-".join(p) for p in zip(w, w[1:])]


def manifest_for(seed: int, spec: SyntheticSpec, doc_themes: list[str]) -> dict:
    planted = [p for t in spec.themes for p in THEMES[t]["phrases"]] + [ADJACENT_PHRASE]
    bigrams = sorted({b for p in planted for b in _sub_bigrams(p)})
    trigrams = sorted("-".join(p.split()) for p in planted if len(p.split()) == 3)
    return {
        "seed": seed,
        "n_docs": spec.n_docs,
        "themes": {t: {"phrases": THEMES[t]["phrases"], "words": THEMES[t]["words"]} for t in spec.themes},
        "shared_word": SHARED_WORD,
        "shared_word_collocations": sorted(
            "-".join(p.split()) for t in spec.themes for p in THEMES[t]["phrases"] if p.split() == [p.split()[0], SHARED_WORD]
        ),
        "always_adjacent_bigram": "-".join(ADJACENT_PHRASE.split()),
        "planted_phrases": planted,
        "expected_r1_collocations": bigrams,
        "expected_r2_trigrams": trigrams,
        "recommended_vocab_size": 250,
        "doc_themes": doc_themes,
    }


def write_manifest(path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
