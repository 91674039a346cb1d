import random

from semgap.textprep import (
    DESCRIPTION,
    REVIEW,
    SentenceRecord,
    VocabStats,
    count_vocab,
    read_corpus,
    split_sentences,
    tokenize,
    write_corpus,
)


class TestSplitSentences:
    def test_two_terminal_marks(self):
        assert split_sentences("Great fit. Loved it!") == ["Great fit.", "Loved it!"]

    def test_abbreviation_guard(self):
        assert split_sentences("Dr. Smith approved it.") == ["Dr. Smith approved it."]

    def test_dotted_abbreviations(self):
        text = "Step three skips a part, e.g. The manual. Read it."
        assert split_sentences(text) == [
            "Step three skips a part, e.g. The manual.",
            "Read it.",
        ]

    def test_tabular_newlines(self):
        assert split_sentences("a\nb", tabular=True) == ["a", "b"]

    def test_boundary_needs_upper_or_digit(self):
        assert split_sentences("It runs about 10 degrees hot. fine by me") == [
            "It runs about 10 degrees hot. fine by me"
        ]
        assert split_sentences("It broke. 3 stars at best.") == [
            "It broke.",
            "3 stars at best.",
        ]

    def test_empty_input(self):
        assert split_sentences("") == []
        assert split_sentences("   \n  ", tabular=True) == []

    def test_trailing_text_without_terminal(self):
        assert split_sentences("Nice! Would buy again") == [
            "Nice!",
            "Would buy again",
        ]


class TestTokenize:
    def test_drops_digits_and_punct(self):
        assert tokenize("USB-C 3.0 cable!") == ["usb", "c", "cable"]

    def test_plain_sentence(self):
        assert tokenize("That is the nature of digital.") == [
            "that", "is", "the", "nature", "of", "digital",
        ]

    def test_all_nonalpha(self):
        assert tokenize("12345") == []
        assert tokenize("!!! ... 42") == []

    def test_unicode_letters_kept(self):
        assert tokenize("Café déjà-vu") == ["café", "déjà", "vu"]

    def test_reserialization_idempotent(self):
        tokens = tokenize("The Kenwell K-1000: 120 V, 3.5 lbs; great!")
        assert tokenize(" ".join(tokens)) == tokens

    def test_fuzz_only_letters_survive(self):
        rng = random.Random(99)
        for _ in range(300):
            raw = bytes(rng.randrange(256) for _ in range(rng.randrange(80)))
            text = raw.decode("utf-8", errors="replace")
            for token in tokenize(text):
                assert token, "empty token"
                assert all(c.isalpha() for c in token), (text, token)
                assert token == token.casefold()


class TestVocabStats:
    def test_counts_by_source(self):
        records = [
            SentenceRecord(["a", "b"], REVIEW),
            SentenceRecord(["a"], REVIEW),
            SentenceRecord(["a", "c"], DESCRIPTION),
        ]
        stats = count_vocab(records)
        assert stats.freq_reviews["a"] == 2
        assert stats.freq_reviews["b"] == 1
        assert stats.freq_descriptions["a"] == 1
        assert stats.freq_mixed("a") == 3
        assert stats.total_reviews == 3
        assert stats.total_descriptions == 2

    def test_empty_stream(self):
        stats = count_vocab([])
        assert stats.total_mixed == 0
        assert stats.freq_mixed("x") == 0

    def test_merge_is_concatenation(self):
        records = [
            SentenceRecord(["x", "y"], REVIEW),
            SentenceRecord(["y"], DESCRIPTION),
            SentenceRecord(["z", "z"], REVIEW),
        ]
        whole = count_vocab(records)
        left = count_vocab(records[:1])
        right = count_vocab(records[1:])
        merged = left.merge(right)
        assert merged.freq_reviews == whole.freq_reviews
        assert merged.freq_descriptions == whole.freq_descriptions
        assert merged.total_mixed == whole.total_mixed


def test_corpus_roundtrip(tmp_path):
    records = [
        SentenceRecord(["great", "fit"], REVIEW, "kitchen"),
        SentenceRecord(["tilt", "head", "design"], DESCRIPTION, "kitchen"),
        SentenceRecord(["café"], REVIEW, "kitchen"),
    ]
    path = tmp_path / "corpus.txt"
    assert write_corpus(path, records) == 3
    back = list(read_corpus(path, "kitchen"))
    assert [r.tokens for r in back] == [r.tokens for r in records]
    assert [r.source for r in back] == [REVIEW, DESCRIPTION, REVIEW]
