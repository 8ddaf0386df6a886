"""
Merging collocations into the vocabulary
========================================

Walks a seeded synthetic corpus through zero, one and two merging rounds,
then compares the result with the t-test bigram baseline.
"""

from colloc_hlta.colloc import PreprocessParams, arity, preprocess, ttest_bigrams
from colloc_hlta.corpus import NormalizationConfig, tokenize_corpus
from colloc_hlta.synthetic import generate_corpus

docs, manifest = generate_corpus(seed=0)
print(len(docs), "documents, e.g.:")
print("  ", docs[0].text[:110], "...")

# lowercase, strip punctuation, drop stopwords and short tokens
corpus = tokenize_corpus(docs, NormalizationConfig())
print("first tokenized doc:", corpus.docs[0].tokens[:12])

P = manifest["recommended_vocab_size"]

# r = 0 is plain TF-IDF selection; every extra round may double token length
for r in (0, 1, 2):
    merged_corpus, vocab = preprocess(corpus, PreprocessParams(r=r, P=P))
    colls = sorted(t for t in vocab.tokens if arity(t) > 1)
    print(f"\nr={r}: {len(vocab.tokens)} tokens, {len(colls)} collocations")
    for t in colls[:12]:
        print("   ", t)

print("\nplanted two-word collocations recovered at r=1:")
_, v1 = preprocess(corpus, PreprocessParams(r=1, P=P))
found = [t for t in manifest["expected_r1_collocations"] if t in v1.tokens]
print(f"   {len(found)}/{len(manifest['expected_r1_collocations'])}")

# the three-word phrase needs a second round
_, v2 = preprocess(corpus, PreprocessParams(r=2, P=P))
print("trigrams at r=2:", [t for t in manifest["expected_r2_trigrams"] if t in v2.tokens])

# baseline: pick bigrams by t-score instead of TF-IDF
top = ttest_bigrams(corpus, 10)
print("\nt-test top 10:", top)
print("always-adjacent pair ranks first:", top[0] == manifest["always_adjacent_bigram"])
