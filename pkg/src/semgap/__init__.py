"""semgap: measure the lexical-semantic gap between two text communities.

The library compares the language of customer reviews with the language of
product descriptions, per domain. Two complementary detectors are provided:

* a compression differential: interleave the corpora, label each target
  word occurrence with its source, compress the source-faithful and the
  label-randomized versions, and read the size difference as the
  information carried by who-said-it (:mod:`semgap.compressgap`);
* a word-level ranker: train embeddings per corpus and score words by how
  little their nearest-neighbor sets overlap (:mod:`semgap.drift`).

A statistics kernel (:mod:`semgap.stats`) relates the per-domain gap to
satisfaction ratings, and :mod:`semgap.synth` generates corpora with
planted drift for validation. The ``semgap`` command line orchestrates the
full pipeline.
"""

from .compressgap import (
    CompressorSpec,
    GapMeasurement,
    GapScoreTable,
    compress_size,
    fit_gap_scores,
    measure_gap,
)
from .drift import DriftParams, DriftRecord, avg_score_at_gt, jaccard, rank_words, score_word
from .embed import (
    EmbeddingSpace,
    TrainParams,
    description_defaults,
    nearest_neighbors,
    review_defaults,
    train_cbow,
)
from .ingest import (
    DescriptionRecord,
    RatingSummary,
    ReviewRecord,
    parse_meta_line,
    parse_review_line,
    summarize_ratings,
)
from .mixer import (
    LabeledCorpus,
    RandomizationParams,
    TargetSelectionParams,
    TargetVocabulary,
    build_mixed,
    label_corpus,
    select_targets,
    serialize_labeled,
)
from .stats import StatResult, dagostino_k2, ols, pearson, spearman
from .synth import SynthSpec, generate_domain, generate_suite
from .textprep import SentenceRecord, VocabStats, count_vocab, split_sentences, tokenize

__version__ = "0.1.0"

__all__ = [
    "CompressorSpec",
    "DescriptionRecord",
    "DriftParams",
    "DriftRecord",
    "EmbeddingSpace",
    "GapMeasurement",
    "GapScoreTable",
    "LabeledCorpus",
    "RandomizationParams",
    "RatingSummary",
    "ReviewRecord",
    "SentenceRecord",
    "StatResult",
    "SynthSpec",
    "TargetSelectionParams",
    "TargetVocabulary",
    "TrainParams",
    "VocabStats",
    "avg_score_at_gt",
    "build_mixed",
    "compress_size",
    "count_vocab",
    "dagostino_k2",
    "description_defaults",
    "fit_gap_scores",
    "generate_domain",
    "generate_suite",
    "jaccard",
    "label_corpus",
    "measure_gap",
    "nearest_neighbors",
    "ols",
    "parse_meta_line",
    "parse_review_line",
    "pearson",
    "rank_words",
    "review_defaults",
    "score_word",
    "select_targets",
    "serialize_labeled",
    "spearman",
    "split_sentences",
    "summarize_ratings",
    "tokenize",
    "train_cbow",
]
