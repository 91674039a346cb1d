"""Sentence segmentation, tokenization and vocabulary counting.

All downstream stages consume the output of this module, so the rules here
are deliberately deterministic: a fixed abbreviation guard instead of a
statistical splitter, and a letters-only tokenizer. Tokens are lowercase
letter runs; digits and punctuation never survive.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

REVIEW = "R"
DESCRIPTION = "D"

# Words before a period that do not end a sentence. "e.g"/"i.e" match the
# chunk with its internal dot, final dot stripped.
ABBREVIATIONS = frozenset(
    ["mr", "mrs", "dr", "st", "vs", "etc", "e.g", "i.e", "in", "oz", "ft"]
)

_TERMINAL = re.compile(r"[.!?]")
_LETTER_RUN = re.compile(r"[^\W\d_]+", re.UNICODE)


@dataclass
class SentenceRecord:
    tokens: list[str]
    source: str  # REVIEW or DESCRIPTION
    domain: str = ""


def split_sentences(text: str, tabular: bool = False) -> list[str]:
    """Split raw text into sentence strings.

    With ``tabular=True`` every newline is a hard boundary (tabular product
    descriptions treat each row as a sentence). Otherwise a boundary is a
    ``. ! ?`` followed by whitespace and then an uppercase letter, a digit,
    or the end of the text, unless the preceding word is a known
    abbreviation.
    """
    if tabular:
        return [part.strip() for part in text.split("\n") if part.strip()]

    sentences = []
    start = 0
    for match in _TERMINAL.finditer(text):
        pos = match.end()
        if pos < len(text) and not text[pos].isspace():
            continue
        follow = pos
        while follow < len(text) and text[follow].isspace():
            follow += 1
        if follow < len(text):
            nxt = text[follow]
            if not (nxt.isupper() or nxt.isdigit()):
                continue
        if match.group() == "." and _is_abbreviation(text, match.start()):
            continue
        sentence = text[start:pos].strip()
        if sentence:
            sentences.append(sentence)
        start = pos
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _is_abbreviation(text: str, dot_index: int) -> bool:
    begin = dot_index
    while begin > 0 and not text[begin - 1].isspace():
        begin -= 1
    chunk = text[begin:dot_index].lower().lstrip("(\"'")
    return chunk in ABBREVIATIONS


def tokenize(sentence: str) -> list[str]:
    """Lowercase letter runs of a sentence; everything else is dropped.

    Case folding happens before extraction so the rule holds for non-ASCII
    letters as well; the isalpha() sweep guards against fold products that
    are not letters (combining marks).
    """
    tokens = []
    for run in _LETTER_RUN.findall(sentence.casefold()):
        if not run.isascii():
            run = "".join(c for c in run if c.isalpha())
            if not run:
                continue
        tokens.append(run)
    return tokens


def sentence_records(
    text: str, source: str, domain: str = "", tabular: bool = False
) -> Iterator[SentenceRecord]:
    """Segment, tokenize and drop empty sentences in one pass."""
    for sentence in split_sentences(text, tabular=tabular):
        tokens = tokenize(sentence)
        if tokens:
            yield SentenceRecord(tokens, source, domain)


@dataclass
class VocabStats:
    """Per-word counts split by source community, mergeable.

    When computed over a mixed (interleaved) corpus these are the balanced
    frequencies: description sentences repeat through cycling, so counts
    from the two sources are comparable.
    """

    freq_reviews: Counter = field(default_factory=Counter)
    freq_descriptions: Counter = field(default_factory=Counter)
    total_reviews: int = 0
    total_descriptions: int = 0

    def add(self, record: SentenceRecord) -> None:
        if record.source == REVIEW:
            self.freq_reviews.update(record.tokens)
            self.total_reviews += len(record.tokens)
        else:
            self.freq_descriptions.update(record.tokens)
            self.total_descriptions += len(record.tokens)

    def merge(self, other: "VocabStats") -> "VocabStats":
        self.freq_reviews.update(other.freq_reviews)
        self.freq_descriptions.update(other.freq_descriptions)
        self.total_reviews += other.total_reviews
        self.total_descriptions += other.total_descriptions
        return self

    def freq_mixed(self, word: str) -> int:
        return self.freq_reviews[word] + self.freq_descriptions[word]

    def mixed_counts(self) -> Counter:
        counts = Counter(self.freq_reviews)
        counts.update(self.freq_descriptions)
        return counts

    @property
    def total_mixed(self) -> int:
        return self.total_reviews + self.total_descriptions


def count_vocab(records: Iterable[SentenceRecord]) -> VocabStats:
    stats = VocabStats()
    for record in records:
        stats.add(record)
    return stats


def write_corpus(path, records: Iterable[SentenceRecord]) -> int:
    """Write the intermediate corpus format: ``R\\t`` / ``D\\t`` prefix, one
    sentence per line, tokens space-separated. Returns sentence count."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(record.source)
            fh.write("\t")
            fh.write(" ".join(record.tokens))
            fh.write("\n")
            n += 1
    return n


def read_corpus(path, domain: str = "") -> Iterator[SentenceRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            source, _, body = line.partition("\t")
            tokens = body.split(" ") if body else []
            if tokens:
                yield SentenceRecord(tokens, source, domain)
