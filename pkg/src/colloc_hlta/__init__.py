"""Collocation-aware hierarchical latent tree topic modeling.

The pipeline: tokenize documents, merge collocations by iterative TF-IDF
selection, build a binary bag-of-words, learn a latent tree model level by
level, then characterize and score its topics.
"""

from .bow import DocTermMatrix, build_binary_bow, read_matrix, write_matrix
from .coherence import CoherenceReport, average_coherence, co_document_frequency, topic_coherence
from .colloc import (
    PreprocessParams,
    TokenStats,
    Vocabulary,
    compute_token_stats,
    preprocess,
    replace_pairs,
    score_pair_candidates,
    select_top_p,
    tfidf_score,
    ttest_bigrams,
)
from .corpus import Corpus, NormalizationConfig, RawDocument, TokenizedDocument, load_corpus, tokenize, tokenize_corpus
from .hlta import LcmFit, LearnParams, LevelData, build_islands, empirical_pairwise_mi, fit_lcm_em, harden_level, learn_hierarchy
from .ltm import (
    LatentTreeModel,
    Node,
    Topic,
    extract_topics,
    infer_posteriors,
    joint_probability,
    mutual_information,
    pairwise_marginal,
    read_model,
    write_model,
)
from .topics import compute_memberships, render_hierarchy

__version__ = "0.1.0"
