# ds_measures.py
# Belief, plausibility and expected interval of a combined evidence body.

from dataclasses import dataclass
from typing import List, NamedTuple

from evidence_core import EvidenceBody
from interval_scale import TOLERANCE, Interval, Scale, TermMatch, interval_to_terms

# Belief values closer than this count as a tie.
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ExpectedInterval:
    """[sum m*inf A_i, sum m*sup A_i]; not clipped, so it may exceed [0, 1] by rounding."""
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def as_interval(self) -> Interval:
        lo = min(max(self.lo, 0.0), 1.0)
        hi = min(max(self.hi, lo), 1.0)
        return Interval(lo, hi)


@dataclass(frozen=True)
class MeasurePair:
    bel: float
    pl: float


class MostProbable(NamedTuple):
    interval: Interval
    measures: MeasurePair
    terms: List[TermMatch]

    @property
    def label(self) -> str:
        return str(self.terms[0].term) if self.terms else ""


@dataclass(frozen=True)
class FocalMeasures:
    interval: Interval
    mass: float
    bel: float
    pl: float


def belief(body: EvidenceBody, a: Interval) -> float:
    """Bel(A): mass of focal elements contained in A."""
    return sum(f.mass for f in body.focal if a.contains(f.interval))


def plausibility(body: EvidenceBody, a: Interval) -> float:
    """Pl(A): mass of focal elements meeting A."""
    return sum(f.mass for f in body.focal if f.interval.intersects(a))


def measures(body: EvidenceBody, a: Interval) -> MeasurePair:
    return MeasurePair(bel=belief(body, a), pl=plausibility(body, a))


def expected_interval(body: EvidenceBody) -> ExpectedInterval:
    lo = sum(f.mass * f.interval.lo for f in body.focal)
    hi = sum(f.mass * f.interval.hi for f in body.focal)
    return ExpectedInterval(lo=lo, hi=hi)


def focal_measures(body: EvidenceBody) -> List[FocalMeasures]:
    """Bel and Pl of every focal element of the body, in focal order."""
    return [
        FocalMeasures(f.interval, f.mass, belief(body, f.interval), plausibility(body, f.interval))
        for f in body.focal
    ]


def most_probable(
    body: EvidenceBody,
    scale: Scale,
    tolerance: float = TOLERANCE,
) -> MostProbable:
    """
    Focal element with the highest belief; ties go to higher plausibility,
    then to the smaller lower bound (then smaller upper bound).
    """
    def rank(fm: FocalMeasures):
        return (
            -round(fm.bel / TIE_TOLERANCE),
            -round(fm.pl / TIE_TOLERANCE),
            fm.interval.lo,
            fm.interval.hi,
        )

    best = min(focal_measures(body), key=rank)
    return MostProbable(
        interval=best.interval,
        measures=MeasurePair(bel=best.bel, pl=best.pl),
        terms=interval_to_terms(scale, best.interval, tolerance),
    )
