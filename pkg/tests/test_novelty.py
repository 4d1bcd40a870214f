import json

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from errors import DuplicateDocId, EmptyInput, InvalidInput, MissingDocument, NoMarkerMatches, ParseError
from novelty import (
    RetrievalPattern,
    SliceMode,
    build_index,
    count_matches,
    group_mean,
    index_documents,
    load_manifest,
    load_pattern,
    novelty_factor,
    novelty_series,
    parse_year_range,
    tokenize,
)


def synthetic_index(marker_hits, query_hits, year=2020):
    """marker_hits documents mention the marker; the first query_hits[q] of them also match query q."""
    documents = []
    for n in range(marker_hits):
        words = ["battery"]
        for q, hits in enumerate(query_hits):
            if n < hits:
                words.append(f"feature{q}")
        documents.append((f"d{n}", year, " ".join(words)))
    return index_documents(documents)


def test_tokenize_casefolds_and_splits():
    assert tokenize("Cocoa-free CHOCOLATE, with_lecithin 2x") == ["cocoa", "free", "chocolate", "with", "lecithin", "2x"]


def test_novelty_arithmetic():
    index = synthetic_index(100, [10, 20])
    pattern = RetrievalPattern.of([["battery", "feature0"], ["battery", "feature1"]], ["battery"], "cell")
    result = novelty_factor(index, pattern)
    assert result.per_query_counts == (10, 20)
    assert result.marker_count == 100
    assert result.raw == 0.85
    assert result.clamped == 0.85


def test_query_hits_above_marker_give_negative_raw():
    index = index_documents([("a", 2020, "battery anode"), ("b", 2020, "anode"), ("c", 2020, "anode")])
    pattern = RetrievalPattern.of([["anode"]], ["battery"])
    result = novelty_factor(index, pattern)
    assert result.raw == pytest.approx(-2.0)
    assert result.clamped == 0.0


def test_no_marker_matches():
    index = synthetic_index(5, [1])
    pattern = RetrievalPattern.of([["feature0"]], ["solar"])
    with pytest.raises(NoMarkerMatches):
        novelty_factor(index, pattern)


@given(st.integers(min_value=1, max_value=50), st.lists(st.integers(min_value=0, max_value=50), min_size=1, max_size=4))
def test_clamped_novelty_in_unit_interval(marker_hits, query_hits):
    index = synthetic_index(marker_hits, query_hits)
    pattern = RetrievalPattern.of([[f"feature{q}"] for q in range(len(query_hits))], ["battery"])
    result = novelty_factor(index, pattern)
    assert 0.0 <= result.clamped <= 1.0


def test_fewer_matches_means_more_novel():
    index = synthetic_index(40, [3, 5, 12, 20])
    rare = RetrievalPattern.of([["feature0"], ["feature1"]], ["battery"], "rare")
    common = RetrievalPattern.of([["feature2"], ["feature3"]], ["battery"], "common")
    assert novelty_factor(index, rare).clamped > novelty_factor(index, common).clamped


def test_conjunctive_queries():
    index = index_documents([("a", 2020, "x y"), ("b", 2020, "x"), ("c", 2020, "y")])
    assert count_matches(index, ["x", "y"]) == 1
    assert count_matches(index, ["X"]) == 2
    assert count_matches(index, ["z"]) == 0
    with pytest.raises(InvalidInput):
        count_matches(index, [])


def test_series_with_growing_matches_is_non_increasing():
    documents = []
    for offset, year in enumerate(range(2008, 2018)):
        for n in range(10):
            words = "battery feature0" if n <= offset else "battery"
            documents.append((f"{year}-{n}", year, words))
    index = index_documents(documents)
    pattern = RetrievalPattern.of([["feature0"]], ["battery"])

    entries = novelty_series(index, pattern, (2008, 2017))
    assert len(entries) == 10
    values = [e.result.clamped for e in entries]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_series_leaves_gaps_and_cumulative_mode_fills_them():
    index = index_documents([
        ("a", 2010, "battery anode"),
        ("b", 2012, "battery"),
    ])
    pattern = RetrievalPattern.of([["anode"]], ["battery"])

    per_year = novelty_series(index, pattern, (2010, 2012))
    assert [e.is_gap for e in per_year] == [False, True, False]

    cumulative = novelty_series(index, pattern, (2010, 2012), SliceMode.CUMULATIVE)
    assert [e.is_gap for e in cumulative] == [False, False, False]
    assert cumulative[2].result.marker_count == 2
    assert cumulative[2].result.raw == pytest.approx(0.5)


def test_group_mean():
    index = synthetic_index(10, [2, 6])
    results = [
        novelty_factor(index, RetrievalPattern.of([["feature0"]], ["battery"])),
        novelty_factor(index, RetrievalPattern.of([["feature1"]], ["battery"])),
    ]
    assert group_mean(results) == pytest.approx((0.8 + 0.4) / 2)
    with pytest.raises(EmptyInput):
        group_mean([])


def test_pattern_validation():
    with pytest.raises(InvalidInput):
        RetrievalPattern.of([], ["battery"])
    with pytest.raises(InvalidInput):
        RetrievalPattern.of([["  "]], ["battery"])
    with pytest.raises(InvalidInput):
        RetrievalPattern.of([["anode"]], [])


def test_parse_year_range():
    assert parse_year_range("2008..2017") == (2008, 2017)
    with pytest.raises(InvalidInput):
        parse_year_range("2008-2017")


def test_sample_corpus(data_dir):
    corpus = data_dir / "sample_corpus"
    index = build_index(corpus / "manifest.jsonl")
    assert index.document_count == 12
    assert index.years == [2014, 2015, 2016, 2017]

    emulsifier = novelty_factor(index, load_pattern(corpus / "pattern.json"))
    filled = novelty_factor(index, load_pattern(corpus / "pattern_filled.json"))
    assert emulsifier.marker_count == 10
    assert emulsifier.per_query_counts == (2, 2)
    assert emulsifier.raw == pytest.approx(0.8)
    assert filled.per_query_counts == (3, 3)
    assert filled.raw == pytest.approx(0.7)
    assert emulsifier.label == "emulsifier"


def test_parallel_build_matches_sequential(data_dir):
    manifest = data_dir / "sample_corpus" / "manifest.jsonl"
    assert build_index(manifest, workers=4) == build_index(manifest)


def test_manifest_errors(tmp_path):
    (tmp_path / "a.txt").write_text("battery", encoding="utf-8")
    manifest = tmp_path / "manifest.jsonl"

    manifest.write_text(
        json.dumps({"id": "a", "year": 2020, "path": "a.txt"}) + "\n"
        + json.dumps({"id": "a", "year": 2021, "path": "a.txt"}) + "\n",
        encoding="utf-8",
    )
    with pytest.raises(DuplicateDocId):
        load_manifest(manifest)

    manifest.write_text(json.dumps({"id": "b", "year": 2020, "path": "missing.txt"}) + "\n", encoding="utf-8")
    with pytest.raises(MissingDocument):
        build_index(manifest)

    manifest.write_text(json.dumps({"id": "a", "year": 2020, "path": "a.txt"}) + "\n{oops\n", encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        load_manifest(manifest)
    assert excinfo.value.line == 2


# ----------------
# Properties over random corpora
# ----------------
VOCAB = ["anode", "cathode", "lithium", "separator", "solvent", "Anode", "LITHIUM"]
MARKER = "battery"

corpora = st.lists(
    st.tuples(st.integers(min_value=2010, max_value=2013), st.lists(st.sampled_from(VOCAB + [MARKER]), max_size=6)),
    max_size=1000,
)
queries = st.lists(st.sampled_from(VOCAB), min_size=1, max_size=3)


def as_documents(corpus):
    return [(f"d{n}", year, ", ".join(words)) for n, (year, words) in enumerate(corpus)]


def scan_count(corpus, query, year=None, mode=SliceMode.PER_YEAR):
    wanted = {term.casefold() for term in query}
    hits = 0
    for doc_year, words in corpus:
        if year is not None:
            in_slice = doc_year <= year if mode == SliceMode.CUMULATIVE else doc_year == year
            if not in_slice:
                continue
        if wanted <= {word.casefold() for word in words}:
            hits += 1
    return hits


@settings(suppress_health_check=[HealthCheck.too_slow])
@given(corpora, queries, st.none() | st.integers(min_value=2009, max_value=2014), st.sampled_from(list(SliceMode)))
def test_count_matches_agrees_with_linear_scan(corpus, query, year, mode):
    index = index_documents(as_documents(corpus))
    assert count_matches(index, query, year, mode) == scan_count(corpus, query, year, mode)


@settings(suppress_health_check=[HealthCheck.too_slow])
@given(corpora, st.lists(queries, min_size=1, max_size=4), st.randoms(use_true_random=False))
def test_novelty_ignores_query_order(corpus, pattern_queries, rnd):
    index = index_documents(as_documents(corpus) + [("marker", 2010, MARKER)])
    shuffled = list(pattern_queries)
    rnd.shuffle(shuffled)

    before = novelty_factor(index, RetrievalPattern.of(pattern_queries, [MARKER]))
    after = novelty_factor(index, RetrievalPattern.of(shuffled, [MARKER]))
    assert after.raw == before.raw
    assert after.clamped == before.clamped
    assert sorted(after.per_query_counts) == sorted(before.per_query_counts)


@settings(suppress_health_check=[HealthCheck.too_slow])
@given(corpora, st.lists(queries, min_size=1, max_size=4))
def test_extra_documents_move_novelty_the_expected_way(corpus, pattern_queries):
    documents = as_documents(corpus) + [("marker", 2010, MARKER)]
    pattern = RetrievalPattern.of(pattern_queries, [MARKER])
    base = novelty_factor(index_documents(documents), pattern).clamped

    counterpart = ("counterpart", 2011, " ".join(pattern_queries[0]))
    with_counterpart = novelty_factor(index_documents(documents + [counterpart]), pattern).clamped
    assert with_counterpart <= base

    marker_only = ("marker-only", 2011, MARKER)
    with_marker_only = novelty_factor(index_documents(documents + [marker_only]), pattern).clamped
    assert with_marker_only >= base
