import json

from colloc_hlta.corpus import NormalizationConfig, tokenize_corpus
from colloc_hlta.synthetic import ADJACENT_PHRASE, SHARED_WORD, THEMES, SyntheticSpec, generate_corpus, write_manifest


def test_seeded_and_distinct():
    a, ma = generate_corpus(3, SyntheticSpec(n_docs=40))
    b, mb = generate_corpus(3, SyntheticSpec(n_docs=40))
    c, _ = generate_corpus(4, SyntheticSpec(n_docs=40))
    assert a == b and ma == mb
    assert a != c


def test_manifest_is_consistent_with_themes():
    _, m = generate_corpus(0, SyntheticSpec(n_docs=30))
    assert m["shared_word"] == SHARED_WORD
    assert len(m["shared_word_collocations"]) >= 2
    assert all(t.endswith("-" + SHARED_WORD) for t in m["shared_word_collocations"])
    assert set(m["shared_word_collocations"]) <= set(m["expected_r1_collocations"])
    assert m["always_adjacent_bigram"] == "-".join(ADJACENT_PHRASE.split())
    assert len(m["doc_themes"]) == 30 and set(m["doc_themes"]) <= set(THEMES)
    planted = {p for t in THEMES.values() for p in t["phrases"]}
    assert planted | {ADJACENT_PHRASE} == set(m["planted_phrases"])


def test_adjacent_words_never_apart_and_text_is_messy():
    docs, _ = generate_corpus(0, SyntheticSpec(n_docs=200))
    raw = " ".join(d.text for d in docs)
    assert any(ch in raw for ch in ",.;") and any(w[:1].isupper() for w in raw.split())
    corpus = tokenize_corpus(docs, NormalizationConfig())
    first, second = ADJACENT_PHRASE.split()
    n_pairs = 0
    for d in corpus.docs:
        t = d.tokens
        for i, w in enumerate(t):
            if w == first:
                assert t[i + 1] == second
                n_pairs += 1
            if w == second:
                assert i > 0 and t[i - 1] == first
    assert n_pairs >= 60
    assert all("the" not in d.tokens for d in corpus.docs)


def test_write_manifest(tmp_path):
    _, m = generate_corpus(1, SyntheticSpec(n_docs=5))
    p = tmp_path / "m.json"
    write_manifest(p, m)
    assert json.loads(p.read_text()) == m
