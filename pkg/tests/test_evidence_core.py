import pytest
from hypothesis import given, strategies as st

from errors import DuplicateResponse, EmptyGroup, InvalidEvidence, InvalidInput, ParseError
from evidence_core import (
    AssessmentKey,
    EvidenceBody,
    ResponseRecord,
    bpa,
    group_records,
    load_survey,
    tally_responses,
)
from interval_scale import Interval, LinguisticTerm, default_scale, term_to_interval

KEY = AssessmentKey("e_learning", "novelty", "students")


def record(expert, term, key=KEY):
    return ResponseRecord(key=key, expert_id=expert, term=LinguisticTerm.parse(term))


def test_tally_counts_equal_assessments():
    records = [record("s1", "high"), record("s2", "high"), record("s3", "low")]
    tally = tally_responses(records, KEY)
    assert tally.total == 3
    assert tally.counts[LinguisticTerm.parse("high")] == 2
    assert tally.counts[LinguisticTerm.parse("low")] == 1


def test_tally_rejects_duplicate_expert_and_empty_group():
    with pytest.raises(DuplicateResponse):
        tally_responses([record("s1", "high"), record("s1", "low")], KEY)
    other = AssessmentKey("e_learning", "novelty", "teachers")
    with pytest.raises(EmptyGroup):
        tally_responses([record("s1", "high")], other)


def test_bpa_masses_are_relative_counts(scale):
    records = [record("s1", "high"), record("s2", "high"), record("s3", "low"), record("s4", "medium stable")]
    body = bpa(tally_responses(records, KEY), scale)
    assert body.source_id == "students"
    assert body.mass_of(Interval(0.67, 1.0)) == pytest.approx(0.5)
    assert body.mass_of(Interval(0.0, 0.33)) == pytest.approx(0.25)
    assert body.mass_of(Interval(0.45, 0.55)) == pytest.approx(0.25)
    assert sum(f.mass for f in body) == pytest.approx(1.0, abs=1e-9)
    assert [f.interval.lo for f in body] == sorted(f.interval.lo for f in body)


def test_bpa_keeps_irrelevant_as_point_interval(scale):
    records = [record("s1", "irrelevant"), record("s2", "low")]
    tally = tally_responses(records, KEY)
    body = bpa(tally, scale)
    assert tally.irrelevant_count == 1
    assert body.mass_of(Interval(0.0, 0.0)) == pytest.approx(0.5)


def test_body_merges_equal_intervals():
    body = EvidenceBody.build("x", [(Interval(0.2, 0.4), 0.25), (Interval(0.2, 0.4 + 1e-12), 0.25), (Interval(0.5, 0.6), 0.5)])
    assert len(body) == 2
    assert body.mass_of(Interval(0.2, 0.4)) == pytest.approx(0.5)


def test_body_validation():
    with pytest.raises(InvalidEvidence):
        EvidenceBody.build("x", [(Interval(0.2, 0.4), 0.5)])
    with pytest.raises(InvalidEvidence):
        EvidenceBody.build("x", [(Interval(0.2, 0.4), 1.2), (Interval(0.5, 0.6), -0.2)])
    with pytest.raises(InvalidEvidence):
        EvidenceBody.build("x", [])


def test_vacuous_body():
    body = EvidenceBody.vacuous()
    assert body.intervals == [Interval.unit()]


def test_assessment_key_requires_ids():
    with pytest.raises(InvalidInput):
        AssessmentKey("e_learning", " ", "students")
    assert str(KEY) == "e_learning/novelty/students"


def test_load_sample_survey(data_dir):
    records = load_survey(data_dir / "sample_survey.csv", "basic-auxiliary")
    assert len(records) == 41
    cells = group_records(records)
    assert len(cells) == 6
    assert cells[("e_learning", "novelty")] == ["management", "students", "teachers"]


def test_load_survey_reports_line_of_bad_term(tmp_path):
    path = tmp_path / "survey.csv"
    path.write_text(
        "component,indicator,group,expert,term\n"
        "c,novelty,g,e1,high\n"
        "c,novelty,g,e2,enormous\n",
        encoding="utf-8",
    )
    with pytest.raises(ParseError) as excinfo:
        load_survey(path)
    assert excinfo.value.line == 3


def test_load_survey_missing_column(tmp_path):
    path = tmp_path / "survey.csv"
    path.write_text("component,indicator,group,term\nc,novelty,g,high\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_survey(path)


def test_load_survey_rejects_mixed_scales(tmp_path):
    path = tmp_path / "survey.csv"
    path.write_text(
        "component,indicator,group,expert,term,scale\n"
        "c,novelty,g,e1,high,basic-auxiliary\n"
        "c,novelty,g,e2,low,five-point\n",
        encoding="utf-8",
    )
    with pytest.raises(InvalidInput):
        load_survey(path)


def test_load_survey_rejects_repeated_expert(tmp_path):
    path = tmp_path / "survey.csv"
    path.write_text(
        "component,indicator,group,expert,term\n"
        "c,novelty,g,e1,high\n"
        "\n"
        "c,novelty,g,e1,low\n",
        encoding="utf-8",
    )
    with pytest.raises(DuplicateResponse):
        load_survey(path)


def test_load_survey_rejects_row_with_extra_fields(tmp_path):
    path = tmp_path / "survey.csv"
    path.write_text(
        "component,indicator,group,expert,term\n"
        "c,novelty,g,e1,high\n"
        ",,,,,stray\n",
        encoding="utf-8",
    )
    with pytest.raises(ParseError) as excinfo:
        load_survey(path)
    assert excinfo.value.line == 3


# ----------------
# Properties over random tallies
# ----------------
SCALE = default_scale()
TERMS = [str(term) for term, _ in SCALE.entries]
OTHER_KEY = AssessmentKey("e_learning", "novelty", "teachers")

tally_counts = st.dictionaries(st.sampled_from(TERMS), st.integers(min_value=1, max_value=12), min_size=1)


def records_from(counts, key=KEY, factor=1):
    records = []
    for term, count in sorted(counts.items()):
        for n in range(count * factor):
            records.append(record(f"{term}-{n}", term, key))
    return records


@given(tally_counts)
def test_bpa_always_builds_a_valid_body(counts):
    body = bpa(tally_responses(records_from(counts), KEY), SCALE)
    total = sum(counts.values())

    assert len(body) == len(counts)
    assert sum(f.mass for f in body) == pytest.approx(1.0, abs=1e-9)
    assert all(f.mass > 0.0 for f in body)
    assert all(0.0 <= f.interval.lo <= f.interval.hi <= 1.0 for f in body)
    keys = [(f.interval.lo, f.interval.hi) for f in body]
    assert keys == sorted(set(keys))
    for term, count in counts.items():
        assert body.mass_of(term_to_interval(SCALE, term)) == pytest.approx(count / total)


@given(tally_counts, st.integers(min_value=2, max_value=5))
def test_bpa_ignores_a_common_factor_in_counts(counts, factor):
    base = bpa(tally_responses(records_from(counts), KEY), SCALE)
    scaled = bpa(tally_responses(records_from(counts, factor=factor), KEY), SCALE)
    assert scaled.intervals == base.intervals
    assert [f.mass for f in scaled] == pytest.approx([f.mass for f in base], abs=1e-12)


@given(tally_counts, tally_counts, st.randoms(use_true_random=False))
def test_tally_ignores_record_order(counts, other_counts, rnd):
    records = records_from(counts) + records_from(other_counts, key=OTHER_KEY)
    shuffled = list(records)
    rnd.shuffle(shuffled)

    first = tally_responses(records, KEY)
    second = tally_responses(shuffled, KEY)
    assert second.total == first.total == sum(counts.values())
    assert second.counts == first.counts
