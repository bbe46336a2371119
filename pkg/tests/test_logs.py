from __future__ import annotations

import re
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antsess.logs import (
    FilterPolicy,
    LogFormat,
    LogRecord,
    UnreadableSource,
    build_catalog,
    filter_page_requests,
    format_clf,
    normalize_resource,
    parse_clf_timestamp,
    parse_log,
)
from antsess.synth import default_model, generate

from conftest import make_record

CANONICAL = '10.0.0.1 - - [10/Mar/2014:13:55:36 +0000] "GET /index.html HTTP/1.1" 200 2326'


def utc_epoch(*args) -> int:
    return int(datetime(*args, tzinfo=timezone.utc).timestamp())


class TestParseClf:
    def test_canonical_line(self):
        result = parse_log([CANONICAL])
        assert len(result.records) == 1
        assert not result.malformed
        record = result.records[0]
        assert record.client_id == "10.0.0.1"
        assert record.resource == "/index.html"
        assert record.status == 200
        assert record.timestamp == utc_epoch(2014, 3, 10, 13, 55, 36)
        assert record.referrer is None
        assert record.user_agent is None

    def test_empty_stream(self):
        result = parse_log([])
        assert result.records == []
        assert result.malformed == []

    def test_timezone_offsets_converge_to_utc(self):
        # same instant written with two different offsets
        assert parse_clf_timestamp("10/Mar/2014:13:55:36 +0000") == parse_clf_timestamp(
            "10/Mar/2014:19:25:36 +0530"
        )
        assert parse_clf_timestamp("10/Mar/2014:08:55:36 -0500") == utc_epoch(
            2014, 3, 10, 13, 55, 36
        )

    def test_authuser_becomes_client_id(self):
        line = '10.0.0.1 - alice [10/Mar/2014:13:55:36 +0000] "GET /a.html HTTP/1.1" 200 17'
        assert parse_log([line]).records[0].client_id == "alice"

    def test_malformed_lines_skipped_with_numbers(self):
        lines = [CANONICAL, "utter garbage", CANONICAL, ""]
        result = parse_log(lines)
        assert len(result.records) == 2
        assert [w.line_number for w in result.malformed] == [2, 4]

    def test_missing_bytes_field_is_malformed(self):
        line = '10.0.0.1 - - [10/Mar/2014:13:55:36 +0000] "GET /a HTTP/1.1" 200'
        assert len(parse_log([line]).malformed) == 1

    def test_unreadable_source_aborts(self):
        def reader():
            yield CANONICAL
            raise OSError("disk gone")

        with pytest.raises(UnreadableSource):
            parse_log(reader())


class TestParseCombined:
    def test_referrer_and_user_agent(self):
        line = (
            '10.0.0.1 - - [10/Mar/2014:13:55:36 +0000] "GET /a.html HTTP/1.1" 200 17 '
            '"http://example.com/start" "Mozilla/5.0"'
        )
        record = parse_log([line], LogFormat.COMBINED).records[0]
        assert record.referrer == "http://example.com/start"
        assert record.user_agent == "Mozilla/5.0"

    def test_dash_fields_become_none(self):
        line = (
            '10.0.0.1 - - [10/Mar/2014:13:55:36 +0000] "GET /a.html HTTP/1.1" 200 17 "-" "-"'
        )
        record = parse_log([line], LogFormat.COMBINED).records[0]
        assert record.referrer is None
        assert record.user_agent is None


class TestParseCsv:
    def test_epoch_timestamp(self):
        record = parse_log(["alice,1394459736,/Index.html"], LogFormat.CSV).records[0]
        assert record == LogRecord("alice", 1394459736, "/index.html", 200)

    def test_iso_timestamp(self):
        record = parse_log(["bob,2014-03-10T13:55:36Z,/a"], LogFormat.CSV).records[0]
        assert record.timestamp == utc_epoch(2014, 3, 10, 13, 55, 36)

    def test_wrong_arity_is_malformed(self):
        assert len(parse_log(["a,b"], LogFormat.CSV).malformed) == 1


class TestNormalize:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("/A/B.Html", "/a/b.html"),
            ("/a/b/?q=1", "/a/b"),
            ("/a#frag", "/a"),
            ("/", "/"),
            ("//", "/"),
            ("http://example.com/Path/", "/path"),
        ],
    )
    def test_cases(self, raw, expected):
        assert normalize_resource(raw) == expected


# independent grammar oracle: month-validated strict CLF shape
_ORACLE = re.compile(
    r"^\S+ \S+ \S+ "
    r"\[\d{1,2}/(Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec)/\d{4}"
    r":\d{2}:\d{2}:\d{2} [+-]\d{4}\] "
    r'"\S+ \S+ \S+" \d{3} (\d+|-)$'
)


def test_corrupted_synthetic_log_counts_match_oracle():
    text, _ = generate(default_model(seed=3), 5000)
    lines = text.splitlines()
    corrupt_at = [17 + 401 * k for k in range(12)]
    for idx in corrupt_at:
        lines[idx] = f"## corrupted line {idx} ##"
    oracle_ok = sum(1 for line in lines if _ORACLE.match(line))
    assert oracle_ok == 4988
    result = parse_log(lines)
    assert len(result.records) == 4988
    assert len(result.malformed) == 12
    assert [w.line_number for w in result.malformed] == [i + 1 for i in corrupt_at]


class TestFilter:
    def test_extension_rule(self):
        records = [
            make_record(resource="/index.html"),
            make_record(resource="/logo.png"),
            make_record(resource="/about.html"),
        ]
        kept = filter_page_requests(records)
        assert [r.resource for r in kept] == ["/index.html", "/about.html"]

    def test_status_rule(self):
        assert filter_page_requests([make_record(resource="/a.html", status=404)]) == []
        assert len(filter_page_requests([make_record(status=304)])) == 1

    def test_custom_policy(self):
        policy = FilterPolicy(
            excluded_extensions=frozenset({".html"}),
            accepted_statuses=frozenset({200}),
        )
        records = [make_record(resource="/a.html"), make_record(resource="/a.pdf")]
        assert [r.resource for r in filter_page_requests(records, policy)] == ["/a.pdf"]

    def test_idempotent(self):
        records = [
            make_record(resource=r, status=s)
            for r in ("/a.html", "/b.css", "/c.gif", "/d")
            for s in (200, 301, 404, 304)
        ]
        once = filter_page_requests(records)
        assert filter_page_requests(once) == once

    def test_planted_assets_removed_exactly(self):
        # generator tags every record; the tag count is the oracle
        text, truth = generate(default_model(seed=5, asset_ratio=0.4), 5000)
        lines = text.splitlines()
        assert len(lines) == 5000
        expected_pages = truth.record_kinds.count("page")
        assert expected_pages == 3000
        records = parse_log(lines).records
        assert len(filter_page_requests(records)) == expected_pages


class TestCatalog:
    def test_first_appearance_order(self):
        records = [make_record(resource=r) for r in ("/a", "/b", "/a")]
        catalog = build_catalog(records)
        assert catalog.pages == ("/a", "/b")
        assert catalog.index == {"/a": 0, "/b": 1}

    def test_empty(self):
        assert build_catalog([]).pages == ()

    def test_matches_generator_page_set(self):
        text, truth = generate(default_model(seed=9), 5000)
        records = filter_page_requests(parse_log(text.splitlines()).records)
        catalog = build_catalog(records)
        assert set(catalog.pages) == set(truth.page_paths)
        assert len(catalog.pages) == len(set(truth.page_paths))

    @given(st.lists(st.sampled_from(["/a", "/b", "/c", "/d/e", "/f"]), max_size=40))
    def test_size_equals_distinct_count(self, resources):
        records = [make_record(resource=r) for r in resources]
        catalog = build_catalog(records)
        assert len(catalog.pages) == len(set(resources))
        assert all(catalog.index[p] == k for k, p in enumerate(catalog.pages))


_path_segment = st.text(alphabet="abcdefghij0123456789-_", min_size=1, max_size=8)


@st.composite
def clf_records(draw):
    host = ".".join(str(draw(st.integers(1, 254))) for _ in range(4))
    path = "/" + "/".join(draw(st.lists(_path_segment, min_size=1, max_size=3)))
    return LogRecord(
        client_id=host,
        timestamp=draw(st.integers(0, 4_000_000_000)),
        resource=path,
        status=draw(st.integers(100, 599)),
    )


@settings(max_examples=200)
@given(clf_records())
def test_clf_roundtrip(record):
    parsed = parse_log([format_clf(record)]).records
    assert parsed == [record]
