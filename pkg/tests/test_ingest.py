import gzip
import json
import math

import pytest

from semgap.ingest import (
    LineParseError,
    ParseCounts,
    RatingAccumulator,
    ReviewRecord,
    iter_descriptions,
    iter_reviews,
    open_text_auto,
    parse_meta_line,
    parse_review_line,
    summarize_ratings,
)


class TestParseReviewLine:
    def test_direct_mapping(self):
        rec = parse_review_line('{"reviewText":"Great fit.","overall":5,"verified":true}')
        assert rec == ReviewRecord("Great fit.", 5, True, "")

    def test_missing_text_skips(self):
        assert parse_review_line('{"overall":4,"verified":false}') is None

    def test_out_of_range_rating_skips(self):
        assert parse_review_line('{"reviewText":"ok","overall":7}') is None
        assert parse_review_line('{"reviewText":"ok","overall":0}') is None

    def test_integral_float_rating_accepted(self):
        rec = parse_review_line('{"reviewText":"ok","overall":4.0}')
        assert rec.rating == 4

    def test_fractional_rating_skips(self):
        assert parse_review_line('{"reviewText":"ok","overall":4.5}') is None

    def test_malformed_json_raises_with_line_number(self):
        with pytest.raises(LineParseError, match="line 12"):
            parse_review_line("{broken", line_no=12)

    def test_whitespace_text_skips(self):
        assert parse_review_line('{"reviewText":"  ","overall":3}') is None


class TestParseMetaLine:
    def test_title_only(self):
        rec = parse_meta_line('{"title":"Timex cd clock radio with nature sounds"}')
        assert rec.text == "Timex cd clock radio with nature sounds"

    def test_array_fields_newline_joined(self):
        rec = parse_meta_line('{"feature":["a","b"]}')
        assert rec.text == "a\nb"

    def test_empty_record_skips(self):
        assert parse_meta_line("{}") is None

    def test_field_order_fixed(self):
        line = json.dumps(
            {
                "feature": ["third"],
                "description": "second",
                "title": "first",
                "similar_item": "fifth",
                "tech1": "between",
            }
        )
        rec = parse_meta_line(line)
        assert rec.text.split("\n") == ["first", "between", "second", "third", "fifth"]

    def test_non_text_fields_ignored(self):
        assert parse_meta_line('{"price":"$10","brand":"X"}') is None


class TestSummarizeRatings:
    def test_constant_input(self):
        records = [ReviewRecord("x", 3, True) for _ in range(3)]
        s = summarize_ratings(records)
        assert (s.n_verified, s.mean, s.std) == (3, 3.0, 0.0)

    def test_symmetric_pair_population_std(self):
        records = [ReviewRecord("x", 1, True), ReviewRecord("x", 5, True)]
        s = summarize_ratings(records)
        assert (s.n_verified, s.mean, s.std) == (2, 3.0, 2.0)

    def test_verified_filter(self):
        records = [ReviewRecord("x", 5, True), ReviewRecord("x", 1, False)]
        s = summarize_ratings(records, verified_only=True)
        assert (s.n_verified, s.mean) == (1, 5.0)
        s_all = summarize_ratings(records, verified_only=False)
        assert (s_all.n_verified, s_all.mean) == (2, 3.0)

    def test_empty_stream_flagged_undefined(self):
        s = summarize_ratings([])
        assert s.n_verified == 0
        assert math.isnan(s.mean) and math.isnan(s.std)
        assert not s.defined

    def test_order_independent(self):
        ratings = [1, 5, 4, 4, 2, 3, 5, 5, 1]
        fwd = summarize_ratings([ReviewRecord("x", r, True) for r in ratings])
        rev = summarize_ratings([ReviewRecord("x", r, True) for r in reversed(ratings)])
        assert fwd == rev

    def test_accumulator_merge_associative(self):
        a, b, whole = RatingAccumulator(), RatingAccumulator(), RatingAccumulator()
        for r in (1, 2, 3):
            a.add(r)
            whole.add(r)
        for r in (5, 5):
            b.add(r)
            whole.add(r)
        assert a.merge(b).summary() == whole.summary()


class TestFileStreaming:
    def test_fixture_counts(self, kitchen_reviews):
        counts = ParseCounts()
        records = list(iter_reviews(kitchen_reviews, "kitchen", counts))
        assert counts.records == len(records) == 197
        assert counts.skipped == 3
        assert counts.parse_errors == 1

    def test_meta_fixture_counts(self, kitchen_meta):
        counts = ParseCounts()
        records = list(iter_descriptions(kitchen_meta, "kitchen", counts))
        assert counts.records == len(records) == 39
        assert counts.skipped == 1
        assert counts.parse_errors == 1

    def test_gzip_by_magic_bytes(self, tmp_path, kitchen_reviews):
        gz = tmp_path / "reviews.data"  # deliberately no .gz extension
        gz.write_bytes(gzip.compress(kitchen_reviews.read_bytes()))
        with open_text_auto(gz) as fh:
            gz_lines = fh.read().splitlines()
        assert gz_lines == kitchen_reviews.read_text().splitlines()
        plain = list(iter_reviews(kitchen_reviews, "k"))
        zipped = list(iter_reviews(gz, "k"))
        assert plain == zipped
