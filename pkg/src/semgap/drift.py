"""Word-level drift scoring, ranking and ground-truth evaluation.

A word drifts when its nearest neighbors in the reviews embedding space
disagree with its neighbors in the descriptions space. The score combines
how frequent the word is (log of the smaller balanced-corpus frequency)
with how little the two neighbor sets overlap, the latter raised to a
power that sharpens the ranking:

    score = ln(min(f_r, f_d)) * (1 - jaccard)^p

Frequencies come from the balanced mixed corpus so the two sides are
comparable despite the raw size imbalance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .embed import EmbeddingSpace, nearest_neighbors
from .textprep import VocabStats


@dataclass
class DriftParams:
    k: int = 30  # neighbors per space
    p: int = 5  # overlap exponent

    def __post_init__(self):
        if self.k < 1 or self.p < 1:
            raise ValueError("k and p must be >= 1")


@dataclass
class DriftRecord:
    word: str
    f_r: int
    f_d: int
    nbrs_r: tuple
    nbrs_d: tuple
    jaccard: float
    score: float
    rank: int = 0


def jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    sa, sb = set(a), set(b)
    union = sa | sb
    if not union:
        raise ValueError("jaccard undefined for two empty sets")
    return len(sa & sb) / len(union)


def score_word(
    f_r: int,
    f_d: int,
    nbrs_r: Iterable[str],
    nbrs_d: Iterable[str],
    params: DriftParams = DriftParams(),
) -> float:
    if f_r < 1 or f_d < 1:
        raise ValueError("frequencies must be >= 1 (word missing from balanced corpus)")
    overlap = jaccard(nbrs_r, nbrs_d)
    return math.log(min(f_r, f_d)) * (1.0 - overlap) ** params.p


def rank_words(
    space_r: EmbeddingSpace,
    space_d: EmbeddingSpace,
    balanced: VocabStats,
    params: DriftParams = DriftParams(),
) -> list[DriftRecord]:
    """Score every word common to both spaces, descending by drift score.

    Words absent from either side of the balanced corpus cannot be scored
    comparably and are skipped (they only arise when the mixing truncated
    a source). Ties break by higher minimum frequency, then word.
    """
    shared = [w for w in space_r.words if w in space_d]
    if not shared:
        raise ValueError("no shared vocabulary between the two spaces")
    records = []
    for word in shared:
        f_r = balanced.freq_reviews[word]
        f_d = balanced.freq_descriptions[word]
        if f_r < 1 or f_d < 1:
            continue
        nbrs_r = tuple(nearest_neighbors(space_r, word, params.k))
        nbrs_d = tuple(nearest_neighbors(space_d, word, params.k))
        overlap = jaccard(nbrs_r, nbrs_d)
        score = math.log(min(f_r, f_d)) * (1.0 - overlap) ** params.p
        records.append(
            DriftRecord(word, f_r, f_d, nbrs_r, nbrs_d, overlap, score)
        )
    if not records:
        raise ValueError("no scorable words: balanced corpus misses the shared vocabulary")
    records.sort(key=lambda r: (-r.score, -min(r.f_r, r.f_d), r.word))
    for rank, record in enumerate(records, 1):
        record.rank = rank
    return records


@dataclass
class PrefixEvaluation:
    """Aggregates over the minimal ranking prefix retrieving all
    ground-truth words: the mean drift score (primary) and the mean
    neighbor-overlap Jaccard (alternative reading)."""

    n_truth: int
    prefix_len: int
    avg_score: float
    avg_jaccard: float


def avg_score_at_gt(
    ranked: Sequence[DriftRecord], gt_words: Iterable[str]
) -> PrefixEvaluation:
    """Evaluate a ranking against annotated drift words.

    Finds the shortest prefix of the ranking that contains every
    ground-truth word and averages over all records in that prefix.
    """
    wanted = list(dict.fromkeys(gt_words))
    if not wanted:
        raise ValueError("ground truth is empty")
    position = {record.word: i for i, record in enumerate(ranked)}
    missing = [w for w in wanted if w not in position]
    if missing:
        raise ValueError(f"ground-truth words missing from ranking: {sorted(missing)}")
    cut = max(position[w] for w in wanted) + 1
    prefix = ranked[:cut]
    avg_s = sum(r.score for r in prefix) / cut
    avg_j = sum(r.jaccard for r in prefix) / cut
    return PrefixEvaluation(len(wanted), cut, avg_s, avg_j)


def load_ground_truth(path) -> dict[str, list[str]]:
    """Read the annotation TSV (domain, word, optional note) per domain."""
    by_domain: dict[str, list[str]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        for row_no, row in enumerate(reader, 1):
            if not row or (row_no == 1 and row[0].lower() == "domain"):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}: row {row_no}: need domain and word columns")
            domain, word = row[0].strip(), row[1].strip()
            if not domain or not word:
                raise ValueError(f"{path}: row {row_no}: empty domain or word")
            by_domain.setdefault(domain, []).append(word)
    if not by_domain:
        raise ValueError(f"{path}: no annotations found")
    return by_domain


def write_ranking_csv(path, records: Sequence[DriftRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["word", "f_r", "f_d", "jaccard", "score", "rank", "nbrs_r", "nbrs_d"]
        )
        for r in records:
            writer.writerow(
                [
                    r.word,
                    r.f_r,
                    r.f_d,
                    f"{r.jaccard:.6f}",
                    f"{r.score:.6f}",
                    r.rank,
                    "|".join(r.nbrs_r),
                    "|".join(r.nbrs_d),
                ]
            )
