"""Synthetic review/description corpora with planted, parameterized drift.

A topic-mixture sampler: every word has a home topic, sentences draw a
topic and then tokens from that topic's distribution, and global token
frequencies follow a Zipf profile. Drift is planted by construction: a
planted word keeps its home topic in reviews but is emitted from a second,
distant topic in descriptions with probability ``drift_strength``. That is
exactly the context-distribution change both detectors target, so planted
words are ground truth for validating the pipeline at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._util import derive_seed
from .textprep import DESCRIPTION, REVIEW, SentenceRecord

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


@dataclass
class SynthSpec:
    vocab_size: int = 2000
    n_topics: int = 20
    n_review_sentences: int = 20_000
    n_description_sentences: int = 2_000
    sentence_length: float = 12.0  # Poisson mean, floored at 3 tokens
    planted_words: int = 0
    drift_strength: float = 0.0
    rating_coupling: float = 0.0
    seed: int = 0
    zipf_exponent: float = 1.0
    # 1-based frequency-rank band eligible for planting; None = automatic
    planted_rank_window: tuple | None = None
    # restrict relocation swap partners to these words (None = any token);
    # partners with the same labeled status keep the serialized byte layout
    # identical across nested planted sets, which stabilizes comparisons
    swap_partner_words: frozenset | None = None
    min_count_reviews: int = 50
    min_count_descriptions: int = 10
    rating_base: float = 4.4
    rating_span: float = 2.0

    def __post_init__(self):
        if self.vocab_size < 10 or self.n_topics < 2:
            raise ValueError("need vocab_size >= 10 and n_topics >= 2")
        if self.planted_words > self.vocab_size // 10:
            raise ValueError("planted_words must not exceed vocab_size / 10")
        if not 0.0 <= self.drift_strength <= 1.0:
            raise ValueError("drift_strength must be in [0, 1]")
        if self.n_review_sentences < 1 or self.n_description_sentences < 1:
            raise ValueError("need at least one sentence per source")


@dataclass
class SynthTruth:
    planted: list[str]
    drift_strength: float
    mean_rating: float
    rating_target: float


@dataclass
class SynthDomain:
    name: str
    reviews: list[SentenceRecord]
    descriptions: list[SentenceRecord]
    ratings: np.ndarray
    truth: SynthTruth


def word_for(index: int) -> str:
    """Deterministic letters-only token for a vocabulary index."""
    letters = []
    i = index
    for _ in range(4):
        letters.append(_ALPHABET[i % 26])
        i //= 26
    return "".join(reversed(letters))


def _zipf_weights(spec: SynthSpec) -> np.ndarray:
    ranks = np.arange(1, spec.vocab_size + 1, dtype=np.float64)
    weights = ranks ** -spec.zipf_exponent
    return weights / weights.sum()


def _expected_tokens(spec: SynthSpec, n_sentences: int) -> float:
    # E[max(3, Poisson(mean))] ~= mean for the means used here
    return n_sentences * max(3.0, spec.sentence_length)


def _pick_planted(spec: SynthSpec, weights: np.ndarray) -> np.ndarray:
    """Planted word indices: the most frequent ranks of the eligible band.

    Taking the first m keeps planted sets nested across increasing m, which
    makes drift-response comparisons on a shared base corpus clean.
    """
    if spec.planted_words == 0:
        return np.zeros(0, dtype=np.int64)
    exp_rev = _expected_tokens(spec, spec.n_review_sentences) * weights
    exp_desc = _expected_tokens(spec, spec.n_description_sentences) * weights
    feasible = (exp_rev >= 2.5 * spec.min_count_reviews) & (
        exp_desc >= 2.5 * spec.min_count_descriptions
    )
    if spec.planted_rank_window is not None:
        lo, hi = spec.planted_rank_window
        band = np.zeros_like(feasible)
        band[lo - 1 : hi] = True
        feasible &= band
    candidates = np.flatnonzero(feasible)
    if candidates.size < spec.planted_words:
        raise ValueError(
            f"infeasible spec: only {candidates.size} words can be planted "
            f"with enough occurrences (need {spec.planted_words})"
        )
    return candidates[: spec.planted_words]


def _emission(spec, weights) -> np.ndarray:
    """Per-topic emission weight matrix (n_topics x vocab): every word is
    emitted only from its home topic."""
    v = spec.vocab_size
    home = np.arange(v) % spec.n_topics
    matrix = np.zeros((spec.n_topics, v))
    matrix[home, np.arange(v)] = weights
    return matrix


def _sample_sentences(rng, spec, matrix, n_sentences, source, domain):
    """Draw sentences: topic ~ emission mass, tokens iid within topic.

    Choosing topics proportionally to their emission mass makes the
    marginal token distribution exactly the configured Zipf profile.
    """
    masses = matrix.sum(axis=1)
    topic_probs = masses / masses.sum()
    topics = rng.choice(spec.n_topics, size=n_sentences, p=topic_probs)
    lengths = np.maximum(3, rng.poisson(spec.sentence_length, size=n_sentences))
    token_ids: list[np.ndarray | None] = [None] * n_sentences
    for t in range(spec.n_topics):
        members = np.flatnonzero(topics == t)
        if members.size == 0:
            continue
        need = int(lengths[members].sum())
        dist = matrix[t] / masses[t]
        draw = rng.choice(spec.vocab_size, size=need, p=dist)
        offset = 0
        for s in members:
            n = int(lengths[s])
            token_ids[s] = draw[offset : offset + n]
            offset += n
    vocab = [word_for(i) for i in range(spec.vocab_size)]
    records = [
        SentenceRecord([vocab[i] for i in ids], source, domain)
        for ids in token_ids
    ]
    return records, topics


def _relocate_drifted(spec, name, sentences, topics, planted) -> None:
    """Move planted-word occurrences into sentences of a distant topic.

    Each occurrence relocates with probability ``drift_strength`` by
    swapping with a random token of a random away-topic sentence, so token
    counts are preserved exactly. Every planted word draws from its own
    seeded stream keyed by the word, which keeps the realized corpus for a
    smaller planted set a strict sub-perturbation of a larger one: drift
    responses measured across nested sets share all base-corpus noise.
    """
    if spec.drift_strength <= 0.0 or planted.size == 0:
        return
    n_topics = spec.n_topics
    by_topic = {t: np.flatnonzero(topics == t) for t in range(n_topics)}
    wanted = {word_for(i): int(i) for i in planted}
    positions: dict[str, list] = {w: [] for w in wanted}
    for si, record in enumerate(sentences):
        for ti, token in enumerate(record.tokens):
            if token in wanted:
                positions[token].append((si, ti))
    partners = spec.swap_partner_words
    for index in planted:
        word = word_for(index)
        away = (index % n_topics + n_topics // 2) % n_topics
        candidates = by_topic[away]
        if candidates.size == 0:
            raise ValueError(
                f"infeasible spec: no sentences of topic {away} to relocate into"
            )
        wrng = np.random.Generator(
            np.random.PCG64(derive_seed(spec.seed, "relocate", name, word))
        )
        occurrences = positions[word]
        moves = wrng.random(len(occurrences)) < spec.drift_strength
        for (si, ti), move in zip(occurrences, moves):
            if not move:
                continue
            tokens_i = sentences[si].tokens
            if tokens_i[ti] != word:  # already swapped away by another word
                continue
            for _attempt in range(64):
                sj = int(candidates[wrng.integers(candidates.size)])
                tokens_j = sentences[sj].tokens
                if partners is None:
                    tj = int(wrng.integers(len(tokens_j)))
                    break
                slots = [
                    k
                    for k, tok in enumerate(tokens_j)
                    if tok != word and tok in partners
                ]
                if slots:
                    tj = int(slots[wrng.integers(len(slots))])
                    break
            else:
                raise ValueError(
                    "infeasible spec: no swap partner found for relocation "
                    f"of {word!r}"
                )
            tokens_i[ti], tokens_j[tj] = tokens_j[tj], tokens_i[ti]


def generate_domain(spec: SynthSpec, name: str = "synth") -> SynthDomain:
    """One synthetic domain: sentences for both sources, ratings, truth."""
    rng = np.random.Generator(np.random.PCG64(derive_seed(spec.seed, "domain", name)))
    weights = _zipf_weights(spec)
    planted = _pick_planted(spec, weights)

    matrix = _emission(spec, weights)
    reviews, _ = _sample_sentences(
        rng, spec, matrix, spec.n_review_sentences, REVIEW, name
    )
    descriptions, desc_topics = _sample_sentences(
        rng, spec, matrix, spec.n_description_sentences, DESCRIPTION, name
    )
    _relocate_drifted(spec, name, descriptions, desc_topics, planted)

    planted_words = [word_for(i) for i in planted]
    _check_planted_counts(spec, planted_words, reviews, descriptions)

    target = spec.rating_base - spec.rating_coupling * spec.rating_span * spec.drift_strength
    target = float(np.clip(target, 1.2, 4.9))
    ratings = np.clip(
        np.rint(rng.normal(target, 1.0, size=spec.n_review_sentences)), 1, 5
    ).astype(np.int64)

    truth = SynthTruth(
        planted=planted_words,
        drift_strength=spec.drift_strength,
        mean_rating=float(ratings.mean()),
        rating_target=target,
    )
    return SynthDomain(name, reviews, descriptions, ratings, truth)


def _check_planted_counts(spec, planted_words, reviews, descriptions):
    if not planted_words:
        return
    wanted = set(planted_words)
    rev_counts = {w: 0 for w in wanted}
    for record in reviews:
        for tok in record.tokens:
            if tok in wanted:
                rev_counts[tok] += 1
    desc_counts = {w: 0 for w in wanted}
    for record in descriptions:
        for tok in record.tokens:
            if tok in wanted:
                desc_counts[tok] += 1
    short = [
        w
        for w in planted_words
        if rev_counts[w] < spec.min_count_reviews
        or desc_counts[w] < spec.min_count_descriptions
    ]
    if short:
        raise ValueError(
            f"infeasible spec: planted words below min_count: {sorted(short)[:5]}"
        )


def generate_suite(
    base_spec: SynthSpec,
    drift_levels: Sequence[float],
    name_prefix: str = "synth",
    rating_jitter: float = 0.0,
    sentence_lengths: Sequence[float] | None = None,
) -> list[SynthDomain]:
    """One domain per drift level, shared base vocabulary, derived seeds.

    ``rating_jitter`` adds seeded per-domain noise to the rating target so
    the constructed drift/rating correlation can be tuned away from -1.
    ``sentence_lengths`` optionally varies sentence length per domain,
    giving the domains honest compressibility differences for the
    cross-domain trend fit.
    """
    if len(drift_levels) == 0:
        raise ValueError("drift_levels must not be empty")
    if sentence_lengths is not None and len(sentence_lengths) != len(drift_levels):
        raise ValueError("sentence_lengths must match drift_levels in length")
    rng = np.random.Generator(
        np.random.PCG64(derive_seed(base_spec.seed, "suite-jitter"))
    )
    domains = []
    for i, level in enumerate(drift_levels):
        jitter = float(rng.normal(0.0, rating_jitter)) if rating_jitter > 0 else 0.0
        spec = replace(
            base_spec,
            drift_strength=float(level),
            seed=derive_seed(base_spec.seed, "suite", i),
            rating_base=base_spec.rating_base + jitter,
            sentence_length=(
                float(sentence_lengths[i])
                if sentence_lengths is not None
                else base_spec.sentence_length
            ),
        )
        domains.append(generate_domain(spec, f"{name_prefix}{i:02d}"))
    return domains
