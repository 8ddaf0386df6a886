"""Loading raw documents and normalizing them into token sequences.

Text is lowercased, every character outside ``[a-z0-9]`` becomes an
underscore, and the result is split on underscore runs.  Tokens shorter than
``min_token_length`` and stopwords are dropped.  An optional per-token hook
stands in for lemmatization.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

__all__ = [
    "RawDocument",
    "TokenizedDocument",
    "Corpus",
    "NormalizationConfig",
    "CorpusError",
    "default_stopwords",
    "read_stopwords",
    "load_corpus",
    "write_jsonl",
    "tokenize",
    "tokenize_corpus",
    "plural_stripper",
]

_NON_ALNUM = re.compile(r"[^a-z0-9]")
_UNDERSCORE_RUN = re.compile(r"_+")
TOKEN_PATTERN = re.compile(r"[a-z0-9_]+")


class CorpusError(ValueError):
    """Raised for unreadable or malformed corpus input."""


@dataclass(frozen=True)
class RawDocument:
    id: str
    text: str


@dataclass(frozen=True)
class TokenizedDocument:
    id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    docs: tuple[TokenizedDocument, ...]

    def __post_init__(self):
        ids = [d.id for d in self.docs]
        if len(set(ids)) != len(ids):
            raise CorpusError("duplicate document id in corpus")

    @property
    def N(self) -> int:
        return len(self.docs)

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self):
        return iter(self.docs)

    @classmethod
    def from_token_lists(cls, token_lists: Iterable[Sequence[str]], ids=None) -> "Corpus":
        """Build a corpus from plain token lists; ids default to ``d0, d1, ...``."""
        token_lists = list(token_lists)
        if ids is None:
            ids = [f"d{i}" for i in range(len(token_lists))]
        return cls(tuple(TokenizedDocument(str(i), tuple(t)) for i, t in zip(ids, token_lists)))

    def token_lists(self) -> list[tuple[str, ...]]:
        return [d.tokens for d in self.docs]


def read_stopwords(path) -> frozenset[str]:
    """Read a stopword file: one token per line, ``#`` comments ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line.lower())
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    ref = resources.files("colloc_hlta").joinpath("data/stopwords.txt")
    with resources.as_file(ref) as p:
        return read_stopwords(p)


@dataclass(frozen=True)
class NormalizationConfig:
    min_token_length: int = 3
    stopword_list: frozenset[str] = field(default_factory=default_stopwords)
    normalizer_hook: Callable[[str], str] | None = None

    def __post_init__(self):
        if self.min_token_length < 1:
            raise ValueError("min_token_length must be >= 1")


def load_corpus(path, format: str = "jsonl") -> list[RawDocument]:
    """Load raw documents from a jsonl file or a directory of ``.txt`` files.

    Parameters
    ----------
    path : path-like
        A jsonl file (one ``{"id": ..., "text": ...}`` record per line) or a
        directory whose ``*.txt`` files become documents named by file stem.
    format : {"jsonl", "textdir"}

    Returns
    -------
    list of RawDocument
        In file order for jsonl, lexicographic filename order for textdir.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"path does not exist: {path}")
    if format == "jsonl":
        docs = _load_jsonl(path)
    elif format == "textdir":
        if not path.is_dir():
            raise CorpusError(f"not a directory: {path}")
        docs = [
            RawDocument(p.stem, p.read_text(encoding="utf-8"))
            for p in sorted(path.glob("*.txt"), key=lambda p: p.name)
        ]
    else:
        raise CorpusError(f"unknown corpus format: {format!r}")
    seen = set()
    for d in docs:
        if d.id in seen:
            raise CorpusError(f"duplicate document id: {d.id!r}")
        seen.add(d.id)
    return docs


def _load_jsonl(path: Path) -> list[RawDocument]:
    docs = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                doc = RawDocument(str(rec["id"]), str(rec["text"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"{path}:{lineno}: malformed record ({exc})") from exc
            docs.append(doc)
    return docs


def write_jsonl(path, docs: Iterable[RawDocument]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for d in docs:
            fh.write(json.dumps({"id": d.id, "text": d.text}, ensure_ascii=False) + "\n")


def _candidates(text: str) -> list[str]:
    replaced = _NON_ALNUM.sub("_", text.lower())
    return [t for t in _UNDERSCORE_RUN.split(replaced) if t]


def tokenize(doc: RawDocument, cfg: NormalizationConfig | None = None) -> TokenizedDocument:
    cfg = cfg or NormalizationConfig()
    out = []
    for tok in _candidates(doc.text):
        if cfg.normalizer_hook is not None:
            tok = cfg.normalizer_hook(tok)
            # hooks may not reintroduce characters outside the token alphabet
            if not tok or not TOKEN_PATTERN.fullmatch(tok) or "_" in tok:
                continue
        if len(tok) < cfg.min_token_length or tok in cfg.stopword_list:
            continue
        out.append(tok)
    return TokenizedDocument(doc.id, tuple(out))


def tokenize_corpus(
    docs: Sequence[RawDocument], cfg: NormalizationConfig | None = None, threads: int = 1
) -> Corpus:
    """Tokenize every document; output order always follows input order."""
    cfg = cfg or NormalizationConfig()
    if threads > 1 and len(docs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tokenized = list(pool.map(lambda d: tokenize(d, cfg), docs))
    else:
        tokenized = [tokenize(d, cfg) for d in docs]
    return Corpus(tuple(tokenized))


def plural_stripper(docs: Iterable[RawDocument]) -> Callable[[str], str]:
    """Return a hook mapping ``xs -> x`` when ``x`` also occurs in ``docs``.

    A crude rule-based lemmatizer: only a trailing ``s`` is removed, and only
    when the stripped form is itself attested somewhere in the collection.
    """
    seen = set()
    for d in docs:
        seen.update(_candidates(d.text))

    def hook(tok: str) -> str:
        if len(tok) > 1 and tok.endswith("s") and not tok.endswith("ss") and tok[:-1] in seen:
            return tok[:-1]
        return tok

    return hook
