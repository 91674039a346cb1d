"""Mixed-corpus construction, target-word selection, and labeling.

The mixed corpus alternates one review sentence with one description
sentence, cycling the (smaller) description side until the reviews run out.
Every occurrence of a target word then carries an ``_R`` or ``_D`` suffix:
source-faithful in the True variant, independently flipped with probability
P in each Rand variant. Both variants serialize to byte streams of exactly
equal length, which is what makes their compressed sizes comparable.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from ._util import derive_seed, mix_bits
from .textprep import REVIEW, SentenceRecord, VocabStats

LABEL_REVIEW = "_R"
LABEL_DESCRIPTION = "_D"


class ConfigurationError(ValueError):
    pass


@dataclass
class TargetSelectionParams:
    top_exclude: int = 500
    min_count: int = 50

    def __post_init__(self):
        if self.top_exclude < 0:
            raise ConfigurationError("top_exclude must be >= 0")
        if self.min_count < 1:
            raise ConfigurationError("min_count must be >= 1")


@dataclass
class TargetVocabulary:
    words: frozenset
    params: TargetSelectionParams

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


@dataclass
class RandomizationParams:
    swap_probability: float = 0.5
    seed: int = 0
    trials: int = 5

    def __post_init__(self):
        if not 0.0 <= self.swap_probability <= 1.0:
            raise ConfigurationError("swap_probability must be in [0, 1]")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")


@dataclass
class LabeledCorpus:
    """A serialized labeled corpus held as bytes plus label bookkeeping.

    ``label_offsets`` are the byte positions of the R/D characters, in
    corpus order; occurrence i of a target word is offsets[i]. Rand
    variants are produced by flipping those single bytes, so every variant
    of one mixed corpus has exactly the same byte length. ``occ_keys``
    identifies each occurrence as (word, per-word ordinal): flip decisions
    keyed this way survive small corpus perturbations, so measurements on
    related corpora share their randomization noise.
    """

    variant: str  # "true" or "rand-t{trial}"
    data: bytes
    label_offsets: np.ndarray
    true_is_review: np.ndarray  # per occurrence, source was a review
    occ_keys: np.ndarray  # uint64 stable identity per occurrence
    n_r: int
    n_d: int

    @property
    def n_bytes(self) -> int:
        return len(self.data)

    @property
    def n_labels(self) -> int:
        return int(self.label_offsets.size)


def build_mixed(
    reviews: Iterable[SentenceRecord], descriptions: Sequence[SentenceRecord]
) -> Iterator[SentenceRecord]:
    """Interleave review and description sentences one at a time.

    Starts with a review; when the descriptions are exhausted, cycling
    restarts at the first description; ends when the reviews are exhausted,
    with a trailing description completing the final pair.
    """
    if not descriptions:
        raise ConfigurationError("cannot mix: no description sentences")
    cycle = itertools.cycle(descriptions)
    empty = True
    for review in reviews:
        empty = False
        yield review
        yield next(cycle)
    if empty:
        raise ConfigurationError("cannot mix: no review sentences")


def select_targets(
    stats: VocabStats, params: TargetSelectionParams = TargetSelectionParams()
) -> TargetVocabulary:
    """Choose the vocabulary whose occurrences get labeled.

    Common words only (present in both sources of the mixed corpus), minus
    the ``top_exclude`` most frequent of those, minus words rarer than
    ``min_count``. Frequencies are mixed-corpus counts. Ties at the
    truncation boundary break lexicographically, smaller word excluded
    first.
    """
    common = [
        (word, stats.freq_mixed(word))
        for word in stats.freq_reviews
        if stats.freq_descriptions[word] > 0
    ]
    common.sort(key=lambda item: (-item[1], item[0]))
    kept = [
        word
        for word, count in common[params.top_exclude :]
        if count >= params.min_count
    ]
    if not kept:
        warnings.warn(
            "empty target vocabulary: gap measurement degenerates to zero",
            stacklevel=2,
        )
    return TargetVocabulary(frozenset(kept), params)


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def _fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


class LabelFlipper:
    """Counter-based flip decisions keyed by (seed, trial, occurrence).

    Occurrences are identified by (word, per-word ordinal) rather than
    global position, so labeling stays reproducible under chunked or
    parallel processing and under small edits to the underlying corpus.
    """

    def __init__(self, seed: int, trial: int, swap_probability: float):
        self.key = derive_seed(seed, "label-flip", trial)
        self.p = swap_probability

    def flags(self, occ_keys: np.ndarray) -> np.ndarray:
        if occ_keys.size == 0:
            return np.zeros(0, dtype=bool)
        u = (mix_bits(occ_keys, self.key) >> np.uint64(11)).astype(
            np.float64
        ) * 2.0**-53
        return u < self.p


def label_corpus(
    mixed: Iterable[SentenceRecord],
    targets: TargetVocabulary,
    variant: str = "true",
    rand_params: RandomizationParams | None = None,
    trial: int = 0,
) -> LabeledCorpus:
    """Serialize a mixed corpus with target-word labels.

    ``variant="true"`` labels by sentence source. ``variant="rand"`` starts
    from the True labels and flips each one independently with probability
    P; requires ``rand_params``.
    """
    if variant == "rand" and rand_params is None:
        raise ConfigurationError("rand variant requires randomization params")
    corpus = _serialize_true(mixed, targets)
    if variant == "true":
        return corpus
    flipper = LabelFlipper(rand_params.seed, trial, rand_params.swap_probability)
    return flip_labels(corpus, flipper, trial)


def _serialize_true(
    mixed: Iterable[SentenceRecord], targets: TargetVocabulary
) -> LabeledCorpus:
    words = targets.words
    lines: list[bytes] = []
    offsets: list[int] = []
    is_review: list[bool] = []
    occ_keys: list[int] = []
    word_keys: dict[str, int] = {}
    ordinals: dict[str, int] = {}
    pos = 0
    n_r = n_d = 0
    for record in mixed:
        review = record.source == REVIEW
        suffix = b"_R" if review else b"_D"
        parts: list[bytes] = []
        for token in record.tokens:
            encoded = token.encode("utf-8")
            if token in words:
                # "_" then the label char follow the raw token bytes
                offsets.append(pos + len(encoded) + 1)
                is_review.append(review)
                key = word_keys.get(token)
                if key is None:
                    key = word_keys[token] = _fnv1a64(token)
                ordinal = ordinals.get(token, 0)
                ordinals[token] = ordinal + 1
                occ_keys.append((key + ordinal) & _MASK64)
                if review:
                    n_r += 1
                else:
                    n_d += 1
                encoded += suffix
            parts.append(encoded)
            pos += len(encoded) + 1  # the space or newline after the token
        lines.append(b" ".join(parts) + b"\n")
    data = b"".join(lines)
    return LabeledCorpus(
        "true",
        data,
        np.asarray(offsets, dtype=np.int64),
        np.asarray(is_review, dtype=bool),
        np.asarray(occ_keys, dtype=np.uint64),
        n_r,
        n_d,
    )


def flip_labels(true_corpus: LabeledCorpus, flipper: LabelFlipper, trial: int) -> LabeledCorpus:
    """Produce a Rand variant by flipping label bytes of the True corpus."""
    buf = np.frombuffer(true_corpus.data, dtype=np.uint8).copy()
    flips = flipper.flags(true_corpus.occ_keys)
    flip_at = true_corpus.label_offsets[flips]
    now_review = true_corpus.true_is_review.copy()
    now_review[flips] = ~now_review[flips]
    buf[flip_at] = np.where(
        buf[flip_at] == ord("R"), np.uint8(ord("D")), np.uint8(ord("R"))
    )
    return LabeledCorpus(
        f"rand-t{trial}",
        buf.tobytes(),
        true_corpus.label_offsets,
        now_review,
        true_corpus.occ_keys,
        int(np.count_nonzero(now_review)),
        int(np.count_nonzero(~now_review)),
    )


def serialize_labeled(corpus: LabeledCorpus) -> bytes:
    """The corpus as its on-disk byte stream (UTF-8, one sentence per line)."""
    return corpus.data


def strip_labels(data: bytes) -> bytes:
    """Remove all ``_R`` / ``_D`` suffixes, recovering the unlabeled corpus."""
    return data.replace(b"_R", b"").replace(b"_D", b"")


def write_labeled(path, corpus: LabeledCorpus) -> None:
    with open(path, "wb") as fh:
        fh.write(corpus.data)


MixedFactory = Callable[[], Iterable[SentenceRecord]]


def labeled_variants(
    mixed_factory: MixedFactory,
    targets: TargetVocabulary,
    rand_params: RandomizationParams,
) -> Iterator[LabeledCorpus]:
    """Yield the True corpus followed by each Rand trial.

    The mixed corpus is consumed once; Rand variants are derived from the
    True serialization by byte flips, which keeps trials cheap and makes
    the equal-length invariant structural.
    """
    true_corpus = label_corpus(mixed_factory(), targets, "true")
    yield true_corpus
    for trial in range(rand_params.trials):
        flipper = LabelFlipper(rand_params.seed, trial, rand_params.swap_probability)
        yield flip_labels(true_corpus, flipper, trial)
