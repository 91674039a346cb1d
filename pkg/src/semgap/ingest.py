"""Streaming parsers for review and product-metadata JSON-lines dumps.

Real dumps contain noise, so the policy is skip-don't-fail: malformed lines
and records missing required fields are counted and reported in the run
manifest instead of aborting. Files may be plain or gzip-compressed;
detection is by magic bytes, not extension.
"""

from __future__ import annotations

import gzip
import io
import json
import math
from dataclasses import dataclass
from typing import Iterator, Optional

META_FIELDS = ("title", "tech1", "description", "feature", "similar_item")
GZIP_MAGIC = b"\x1f\x8b"


class LineParseError(ValueError):
    """A single malformed input line; recoverable by skipping it."""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


@dataclass
class ReviewRecord:
    text: str
    rating: int
    verified: bool
    domain: str = ""


@dataclass
class DescriptionRecord:
    text: str
    domain: str = ""


@dataclass
class RatingSummary:
    n_verified: int
    mean: float
    std: float  # population standard deviation

    @property
    def defined(self) -> bool:
        return self.n_verified > 0


@dataclass
class ParseCounts:
    records: int = 0
    skipped: int = 0
    parse_errors: int = 0

    def merge(self, other: "ParseCounts") -> "ParseCounts":
        self.records += other.records
        self.skipped += other.skipped
        self.parse_errors += other.parse_errors
        return self


def open_text_auto(path) -> io.TextIOBase:
    """Open a path as UTF-8 text, transparently decompressing gzip."""
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == GZIP_MAGIC:
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def parse_review_line(
    line: str, line_no: Optional[int] = None, domain: str = ""
) -> Optional[ReviewRecord]:
    """One review record, or None when the line should be skipped.

    Skips: missing/empty review text, missing rating, rating outside 1..5.
    Raises LineParseError on malformed JSON.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LineParseError(str(exc), line_no) from exc
    if not isinstance(obj, dict):
        raise LineParseError("expected a JSON object", line_no)
    text = obj.get("reviewText")
    if not isinstance(text, str) or not text.strip():
        return None
    rating = obj.get("overall")
    if isinstance(rating, bool) or not isinstance(rating, (int, float)):
        return None
    if float(rating) != int(rating) or not 1 <= int(rating) <= 5:
        return None
    return ReviewRecord(text, int(rating), bool(obj.get("verified", False)), domain)


def parse_meta_line(
    line: str, line_no: Optional[int] = None, domain: str = ""
) -> Optional[DescriptionRecord]:
    """One product-description record from a metadata line, or None.

    The five description-bearing fields are concatenated in fixed order,
    newline-joined; array-valued fields contribute one line per element so
    each element later becomes its own sentence.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LineParseError(str(exc), line_no) from exc
    if not isinstance(obj, dict):
        raise LineParseError("expected a JSON object", line_no)
    parts: list[str] = []
    for key in META_FIELDS:
        value = obj.get(key)
        if isinstance(value, str):
            if value.strip():
                parts.append(value)
        elif isinstance(value, list):
            parts.extend(str(v) for v in value if isinstance(v, str) and v.strip())
    text = "\n".join(parts)
    if not text.strip():
        return None
    return DescriptionRecord(text, domain)


def iter_reviews(
    path, domain: str = "", counts: Optional[ParseCounts] = None
) -> Iterator[ReviewRecord]:
    """Stream ReviewRecords from a JSON-lines file, counting skips."""
    counts = counts if counts is not None else ParseCounts()
    with open_text_auto(path) as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = parse_review_line(line, line_no, domain)
            except LineParseError:
                counts.parse_errors += 1
                continue
            if record is None:
                counts.skipped += 1
                continue
            counts.records += 1
            yield record


def iter_descriptions(
    path, domain: str = "", counts: Optional[ParseCounts] = None
) -> Iterator[DescriptionRecord]:
    counts = counts if counts is not None else ParseCounts()
    with open_text_auto(path) as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = parse_meta_line(line, line_no, domain)
            except LineParseError:
                counts.parse_errors += 1
                continue
            if record is None:
                counts.skipped += 1
                continue
            counts.records += 1
            yield record


class RatingAccumulator:
    """Single-pass mean/population-std accumulator; merges associatively."""

    def __init__(self) -> None:
        self.n = 0
        self.total = 0.0
        self.total_sq = 0.0

    def add(self, rating: float) -> None:
        self.n += 1
        self.total += rating
        self.total_sq += rating * rating

    def merge(self, other: "RatingAccumulator") -> "RatingAccumulator":
        self.n += other.n
        self.total += other.total
        self.total_sq += other.total_sq
        return self

    def summary(self) -> RatingSummary:
        if self.n == 0:
            return RatingSummary(0, math.nan, math.nan)
        mean = self.total / self.n
        variance = max(0.0, self.total_sq / self.n - mean * mean)
        return RatingSummary(self.n, mean, math.sqrt(variance))


def summarize_ratings(records, verified_only: bool = True) -> RatingSummary:
    acc = RatingAccumulator()
    for record in records:
        if verified_only and not record.verified:
            continue
        acc.add(record.rating)
    return acc.summary()
