"""CBOW word embeddings with negative sampling, trained per corpus.

One space is trained on the reviews of a domain and another on its
descriptions; comparing a word's nearest neighbors across the two spaces is
what exposes drift. Training follows the standard CBOW recipe: mean of
context vectors over a per-position window shrunk uniformly to [1, window],
negative samples from the unigram^0.75 distribution, frequent-word
subsampling, and linear learning-rate decay. Single-threaded training is
bitwise reproducible for a given seed.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_MAGIC = b"SGE1"


@dataclass
class TrainParams:
    dim: int = 100
    window: int = 5
    epochs: int = 5
    min_count: int = 5
    negative: int = 5
    subsample_threshold: float = 1e-3
    lr_start: float = 0.025
    lr_end: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.epochs < 1:
            raise ValueError("dim, window and epochs must all be >= 1")
        if not self.lr_start > self.lr_end > 0:
            raise ValueError("need lr_start > lr_end > 0")
        if self.negative < 1:
            raise ValueError("negative sample count must be >= 1")


def review_defaults(seed: int = 0) -> TrainParams:
    """Defaults for the large reviews corpus of a domain."""
    return TrainParams(dim=200, epochs=5, min_count=50, seed=seed)


def description_defaults(seed: int = 0) -> TrainParams:
    """Defaults for the small, noisier descriptions corpus: fewer
    parameters to learn, more passes, lower frequency floor."""
    return TrainParams(dim=50, epochs=10, min_count=10, seed=seed)


class EmbeddingSpace:
    """Immutable trained space: vocabulary, frequencies and input vectors."""

    def __init__(self, words, freqs, vectors, params=None, epoch_losses=None):
        self.words = list(words)
        self.freqs = np.asarray(freqs, dtype=np.int64)
        self.vectors = np.asarray(vectors, dtype=np.float32)
        self.params = params
        self.epoch_losses = list(epoch_losses or [])
        self.index = {w: i for i, w in enumerate(self.words)}
        self._unit = None
        self._lexrank = None

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.words)

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self.index[word]]

    def frequency(self, word: str) -> int:
        return int(self.freqs[self.index[word]])

    def _unit_vectors(self) -> np.ndarray:
        if self._unit is None:
            norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
            norms[norms == 0] = 1.0
            self._unit = self.vectors / norms
        return self._unit

    def _lex_ranks(self) -> np.ndarray:
        if self._lexrank is None:
            ranks = np.empty(len(self.words), dtype=np.int64)
            ranks[np.argsort(np.array(self.words, dtype=object))] = np.arange(
                len(self.words)
            )
            self._lexrank = ranks
        return self._lexrank


def _build_vocab(sentences: Sequence[list[str]], min_count: int):
    counts: dict[str, int] = {}
    total = 0
    for sentence in sentences:
        total += len(sentence)
        for token in sentence:
            counts[token] = counts.get(token, 0) + 1
    kept = [(w, c) for w, c in counts.items() if c >= min_count]
    # frequency-descending, then lexicographic: a stable, seed-independent order
    kept.sort(key=lambda item: (-item[1], item[0]))
    return kept, total


def train_cbow(sentences: Sequence[list[str]], params: TrainParams) -> EmbeddingSpace:
    """Train an embedding space over tokenized sentences.

    ``sentences`` must be re-iterable (a list); each epoch is one pass.
    """
    vocab, corpus_tokens = _build_vocab(sentences, params.min_count)
    if not vocab:
        raise ValueError(
            f"no word reaches min_count={params.min_count}; corpus too small"
        )
    if corpus_tokens < 10 * params.dim:
        warnings.warn(
            f"corpus has only {corpus_tokens} tokens for dim={params.dim}; "
            "vectors will be noisy",
            stacklevel=2,
        )
    words = [w for w, _ in vocab]
    freqs = np.array([c for _, c in vocab], dtype=np.int64)
    index = {w: i for i, w in enumerate(words)}
    vocab_size = len(words)

    retained = int(freqs.sum())
    # word2vec subsampling: keep_p = (sqrt(f/t) + 1) * t/f on corpus fractions
    t = params.subsample_threshold
    frac = freqs / retained
    keep_prob = np.minimum(1.0, (np.sqrt(frac / t) + 1.0) * (t / frac))

    noise = freqs.astype(np.float64) ** 0.75
    noise_cum = np.cumsum(noise)
    noise_total = noise_cum[-1]

    encoded = []
    for sentence in sentences:
        ids = [index[tok] for tok in sentence if tok in index]
        if ids:
            encoded.append(np.array(ids, dtype=np.int64))
    planned = params.epochs * sum(arr.size for arr in encoded)
    if planned == 0:
        raise ValueError("no trainable tokens after vocabulary filtering")

    rng = np.random.Generator(np.random.PCG64(params.seed))
    syn0 = ((rng.random((vocab_size, params.dim)) - 0.5) / params.dim).astype(
        np.float32
    )
    syn1 = np.zeros((vocab_size, params.dim), dtype=np.float32)

    labels = np.zeros(params.negative + 1, dtype=np.float32)
    labels[0] = 1.0
    lr_span = params.lr_start - params.lr_end
    processed = 0
    alpha = params.lr_start
    epoch_losses = []
    loss_every = 16  # sampled loss; full tracking would slow the hot loop
    step = 0

    for _epoch in range(params.epochs):
        loss_sum = 0.0
        loss_n = 0
        for ids in encoded:
            n_raw = ids.size
            kept = ids[rng.random(n_raw) < keep_prob[ids]]
            n = kept.size
            if n >= 2:
                half_windows = rng.integers(1, params.window + 1, size=n)
                negs = np.searchsorted(
                    noise_cum,
                    rng.random((n, params.negative)) * noise_total,
                    side="right",
                )
                for pos in range(n):
                    b = half_windows[pos]
                    lo = pos - b if pos > b else 0
                    hi = pos + b + 1
                    if hi > n:
                        hi = n
                    ctx = np.concatenate((kept[lo:pos], kept[pos + 1 : hi]))
                    if ctx.size == 0:
                        continue
                    target = kept[pos]
                    row = negs[pos]
                    row = row[row != target]  # drop collisions with the target
                    out_idx = np.concatenate(([target], row))
                    l1 = syn0[ctx].mean(axis=0)
                    l2 = syn1[out_idx]
                    score = l2 @ l1
                    np.clip(score, -30.0, 30.0, out=score)
                    f = 1.0 / (1.0 + np.exp(-score))
                    g = (labels[: f.size] - f) * alpha
                    np.add.at(syn1, out_idx, g[:, None] * l1[None, :])
                    neu1e = g @ l2
                    np.add.at(syn0, ctx, neu1e)
                    if step % loss_every == 0:
                        eps = np.float32(1e-10)
                        loss_sum -= float(np.log(f[0] + eps))
                        loss_sum -= float(np.log1p(-f[1:] + eps).sum())
                        loss_n += 1
                    step += 1
            processed += n_raw
            alpha = params.lr_start - lr_span * (processed / planned)
            if alpha < params.lr_end:
                alpha = params.lr_end
        epoch_losses.append(loss_sum / loss_n if loss_n else float("nan"))

    return EmbeddingSpace(words, freqs, syn0, params, epoch_losses)


def nearest_neighbors(space: EmbeddingSpace, word: str, k: int) -> list[str]:
    """Top-k words by cosine similarity, excluding the query itself.

    Ties break by descending corpus frequency, then lexicographically.
    """
    if word not in space.index:
        raise KeyError(f"word not in vocabulary: {word!r}")
    if k < 1 or k >= len(space):
        raise ValueError(f"k must be in [1, vocabulary size): got {k}")
    unit = space._unit_vectors()
    query = space.index[word]
    cos = unit @ unit[query]
    order = np.lexsort((space._lex_ranks(), -space.freqs, -cos))
    result = []
    for idx in order:
        if idx == query:
            continue
        result.append(space.words[idx])
        if len(result) == k:
            break
    return result


def save_embeddings(space: EmbeddingSpace, path) -> None:
    """Binary persistence: header then length-prefixed word entries."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", space.vectors.shape[1], len(space)))
        for i, word in enumerate(space.words):
            encoded = word.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<Q", int(space.freqs[i])))
            fh.write(space.vectors[i].astype("<f4").tobytes())


def load_embeddings(path) -> EmbeddingSpace:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"not an embedding file: {path}")
        dim, size = struct.unpack("<II", fh.read(8))
        words = []
        freqs = np.empty(size, dtype=np.int64)
        vectors = np.empty((size, dim), dtype=np.float32)
        for i in range(size):
            (wlen,) = struct.unpack("<H", fh.read(2))
            words.append(fh.read(wlen).decode("utf-8"))
            (freqs[i],) = struct.unpack("<Q", fh.read(8))
            vectors[i] = np.frombuffer(fh.read(4 * dim), dtype="<f4")
    return EmbeddingSpace(words, freqs, vectors)


def export_text(space: EmbeddingSpace, path) -> None:
    """Plain-text export: one word and its vector components per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, word in enumerate(space.words):
            values = " ".join(repr(float(v)) for v in space.vectors[i])
            fh.write(f"{word} {values}\n")
