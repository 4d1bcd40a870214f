import itertools
import json

import pytest
from hypothesis import assume, given, strategies as st

from ds_combine import combine_all, combine_pair, load_bodies
from errors import EmptyInput, InvalidEvidence, ParseError, TotalConflict
from evidence_core import EvidenceBody
from interval_scale import Interval

grid_points = st.integers(min_value=0, max_value=20).map(lambda n: n / 20)


@st.composite
def interval_on_grid(draw):
    a, b = draw(grid_points), draw(grid_points)
    return Interval(min(a, b), max(a, b))


@st.composite
def bodies(draw, source_id="s"):
    intervals = draw(st.lists(interval_on_grid(), min_size=1, max_size=4))
    weights = draw(st.lists(st.integers(min_value=1, max_value=10), min_size=len(intervals), max_size=len(intervals)))
    total = sum(weights)
    return EvidenceBody.build(source_id, [(i, w / total) for i, w in zip(intervals, weights)])


@st.composite
def body_lists(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    return [draw(bodies(source_id=f"s{k}")) for k in range(n)]


def n_way_combination(bodies_):
    """Full product enumeration over every choice of one focal element per source."""
    accrued = {}
    agreement = 0.0
    for choice in itertools.product(*(b.focal for b in bodies_)):
        mass = 1.0
        lo, hi = 0.0, 1.0
        for element in choice:
            mass *= element.mass
            lo = max(lo, element.interval.lo)
            hi = min(hi, element.interval.hi)
        if lo <= hi:
            agreement += mass
            accrued[(lo, hi)] = accrued.get((lo, hi), 0.0) + mass
    return {k: m / agreement for k, m in accrued.items()} if agreement else {}, agreement


def test_worked_example(worked_bodies):
    combined, conflict = combine_pair(*worked_bodies)
    assert conflict == pytest.approx(0.5, abs=1e-9)
    assert combined.intervals == [Interval(0.23, 0.33), Interval(0.67, 0.77)]
    assert combined.mass_of(Interval(0.23, 0.33)) == pytest.approx(0.6, abs=1e-9)
    assert combined.mass_of(Interval(0.67, 0.77)) == pytest.approx(0.4, abs=1e-9)
    assert combined.source_id == "students+teachers"


def test_combine_all_reports_pair_conflicts(worked_bodies):
    report = combine_all(worked_bodies)
    assert report.source_order == ("students", "teachers")
    assert report.total_conflicts == pytest.approx([0.5])
    assert report.pair_conflicts[0].left_source == "students"


def test_single_source_is_echoed(worked_bodies):
    report = combine_all(worked_bodies[:1])
    assert report.combined == worked_bodies[0]
    assert report.pair_conflicts == ()


def test_empty_input():
    with pytest.raises(EmptyInput):
        combine_all([])


def test_vacuous_body_is_neutral(worked_bodies):
    combined, conflict = combine_pair(worked_bodies[0], EvidenceBody.vacuous())
    assert conflict == 0.0
    for element in worked_bodies[0]:
        assert combined.mass_of(element.interval) == pytest.approx(element.mass, abs=1e-12)


def test_total_conflict_names_accumulated_source():
    a = EvidenceBody.build("a", [(Interval(0.0, 0.3), 1.0)])
    b = EvidenceBody.build("b", [(Interval(0.1, 0.2), 1.0)])
    c = EvidenceBody.build("c", [(Interval(0.7, 1.0), 1.0)])
    with pytest.raises(TotalConflict) as excinfo:
        combine_all([a, b, c])
    assert excinfo.value.left_source == "a+b"
    assert excinfo.value.right_source == "c"
    assert excinfo.value.conflict == pytest.approx(1.0)
    keyed = excinfo.value.with_key("e_learning/novelty")
    assert str(keyed).startswith("e_learning/novelty: ")


@given(body_lists())
def test_pairwise_fold_matches_n_way_enumeration(bodies_):
    expected, agreement = n_way_combination(bodies_)
    assume(agreement > 1e-6)

    combined = combine_all(bodies_).combined
    assert len(combined) == len(expected)
    for (lo, hi), mass in expected.items():
        assert combined.mass_of(Interval(lo, hi)) == pytest.approx(mass, abs=1e-9)


@given(body_lists(), st.randoms(use_true_random=False))
def test_source_order_does_not_matter(bodies_, rng):
    _, agreement = n_way_combination(bodies_)
    assume(agreement > 1e-6)

    shuffled = list(bodies_)
    rng.shuffle(shuffled)
    first = combine_all(bodies_).combined
    second = combine_all(shuffled).combined
    assert first.intervals == second.intervals
    for element in first:
        assert second.mass_of(element.interval) == pytest.approx(element.mass, abs=1e-6)


@given(bodies(), bodies())
def test_combined_masses_sum_to_one(b1, b2):
    _, agreement = n_way_combination([b1, b2])
    assume(agreement > 1e-6)
    combined, conflict = combine_pair(b1, b2)
    assert 0.0 <= conflict < 1.0
    assert sum(f.mass for f in combined) == pytest.approx(1.0, abs=1e-9)


def test_load_sample_bodies(data_dir):
    loaded = load_bodies(data_dir / "sample_bodies.json")
    assert [b.source_id for b in loaded] == ["students", "teachers"]
    report = combine_all(loaded)
    assert report.combined.mass_of(Interval(0.23, 0.33)) == pytest.approx(0.6, abs=1e-9)


def test_load_bodies_errors(tmp_path):
    path = tmp_path / "bodies.json"
    path.write_text(json.dumps({"sources": [{"id": "a", "focal": [{"lo": 0.1, "hi": 0.2, "mass": 0.5}]}]}), encoding="utf-8")
    with pytest.raises(InvalidEvidence):
        load_bodies(path)

    path.write_text(json.dumps({"sources": [
        {"id": "a", "focal": [{"lo": 0.1, "hi": 0.2, "mass": 1.0}]},
        {"id": "a", "focal": [{"lo": 0.1, "hi": 0.3, "mass": 1.0}]},
    ]}), encoding="utf-8")
    with pytest.raises(InvalidEvidence):
        load_bodies(path)

    path.write_text(json.dumps({"bodies": []}), encoding="utf-8")
    with pytest.raises(ParseError):
        load_bodies(path)
