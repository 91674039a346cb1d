"""Compression differential between True and Rand corpora, and gap scores.

The information added by randomizing source labels is measured as the
difference between compressed sizes: delta = C(Rand) - C(True), averaged
over independent Rand trials. Across domains, the relative differential
correlates with how compressible a corpus is in the first place, so the
per-domain gap score is the residual from the least-squares trend of
rel_delta on compression ratio.
"""

from __future__ import annotations

import bz2
import warnings
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from . import stats
from .mixer import MixedFactory, RandomizationParams, TargetVocabulary, labeled_variants


class InvariantViolation(RuntimeError):
    """A structural guarantee failed; results would be meaningless."""


@dataclass
class CompressorSpec:
    format: str = "bzip2"
    level: int = 9  # bzip2 work factor; 9 = 900k blocks

    def __post_init__(self):
        if self.format != "bzip2":
            raise ValueError(f"unsupported compressor format: {self.format!r}")
        if not 1 <= self.level <= 9:
            raise ValueError("bzip2 level must be in 1..9")

    @property
    def identity(self) -> str:
        return f"python-bz2/{self.format}-{self.level}"


@dataclass
class GapMeasurement:
    domain: str
    raw_size: int
    c_true: int
    c_rand_mean: float
    c_rand_std: float
    delta: float
    rel_delta: float
    compression_ratio: float
    trials: int


@dataclass
class GapScoreRow:
    domain: str
    rel_delta: float
    compression_ratio: float
    gap_score: float
    gap_rank: int = 0


@dataclass
class GapScoreTable:
    rows: list[GapScoreRow]
    intercept: float
    slope: float
    r_squared: float
    degenerate: bool = False

    def score_of(self, domain: str) -> float:
        for row in self.rows:
            if row.domain == domain:
                return row.gap_score
        raise KeyError(domain)


def compress_size(data: Union[bytes, Iterable[bytes]], spec: CompressorSpec = CompressorSpec()) -> int:
    """Exact compressed length of a byte stream, without keeping the output."""
    compressor = bz2.BZ2Compressor(spec.level)
    if isinstance(data, (bytes, bytearray, memoryview)):
        data = (data,)
    total = 0
    for chunk in data:
        total += len(compressor.compress(chunk))
    return total + len(compressor.flush())


def measure_gap(
    domain: str,
    mixed_factory: MixedFactory,
    targets: TargetVocabulary,
    rand_params: RandomizationParams,
    spec: CompressorSpec = CompressorSpec(),
    keep_corpora: list | None = None,
) -> GapMeasurement:
    """Run the True/Rand compression differential for one domain.

    ``keep_corpora``, when given, receives the LabeledCorpus objects so the
    caller can write them to disk without a second pass.
    """
    c_true = None
    raw_size = None
    rand_sizes = []
    for corpus in labeled_variants(mixed_factory, targets, rand_params):
        if raw_size is None:
            raw_size = corpus.n_bytes
        elif corpus.n_bytes != raw_size:
            raise InvariantViolation(
                f"{domain}: variant {corpus.variant} has {corpus.n_bytes} bytes, "
                f"expected {raw_size}"
            )
        size = compress_size(corpus.data, spec)
        if corpus.variant == "true":
            c_true = size
        else:
            rand_sizes.append(size)
        if keep_corpora is not None:
            keep_corpora.append(corpus)
    if raw_size == 0 or c_true is None or c_true == 0:
        raise InvariantViolation(f"{domain}: empty corpus")
    c_rand_mean = float(np.mean(rand_sizes))
    c_rand_std = float(np.std(rand_sizes))
    delta = c_rand_mean - c_true
    return GapMeasurement(
        domain=domain,
        raw_size=raw_size,
        c_true=c_true,
        c_rand_mean=c_rand_mean,
        c_rand_std=c_rand_std,
        delta=delta,
        rel_delta=delta / c_true,
        compression_ratio=c_true / raw_size,
        trials=len(rand_sizes),
    )


def fit_gap_scores(measurements: list[GapMeasurement]) -> GapScoreTable:
    """Per-domain gap scores as residuals from the cross-domain trend.

    Ordinary least squares of rel_delta on compression ratio; the residual
    is the part of the differential not explained by compressibility.
    Domains are ranked by descending gap score. With identical x values the
    fit degenerates and scores fall back to centered rel_delta.
    """
    if len(measurements) < 3:
        raise ValueError("trend fit needs at least 3 domains")
    x = np.array([m.compression_ratio for m in measurements])
    y = np.array([m.rel_delta for m in measurements])
    try:
        fit = stats.ols(x, y)
        residuals = fit.residuals
        intercept, slope, r2 = fit.intercept, fit.slope, fit.r_squared
        degenerate = False
    except ValueError:
        warnings.warn(
            "all compression ratios identical: gap scores fall back to "
            "centered rel_delta",
            stacklevel=2,
        )
        residuals = y - y.mean()
        intercept, slope, r2 = float(y.mean()), 0.0, 0.0
        degenerate = True
    rows = [
        GapScoreRow(m.domain, m.rel_delta, m.compression_ratio, float(res))
        for m, res in zip(measurements, residuals)
    ]
    rows.sort(key=lambda r: (-r.gap_score, r.domain))
    for rank, row in enumerate(rows, 1):
        row.gap_rank = rank
    return GapScoreTable(rows, intercept, slope, r2, degenerate)
