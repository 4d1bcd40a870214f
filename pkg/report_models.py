# report_models.py

from decimal import ROUND_HALF_EVEN, Decimal
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

# Bel <= Pl and containment checks allow this much rounding.
CHECK_TOLERANCE = 1e-9

DECIMAL_PLACES = Decimal("0.000001")


def fmt(value: float) -> str:
    """Fixed 6-decimal text, round-half-even, never '-0.000000'."""
    quantized = Decimal(repr(float(value))).quantize(DECIMAL_PLACES, rounding=ROUND_HALF_EVEN)
    if quantized.is_zero():
        quantized = abs(quantized)
    return format(quantized, "f")


def rounded(value: float) -> float:
    return float(fmt(value))


class GroupTally(BaseModel):
    """Response counts of one expert group for one (component, indicator)."""
    group: str
    total: int
    counts: Dict[str, int]


class FocalRow(BaseModel):
    lo: float
    hi: float
    mass: float
    bel: float
    pl: float


class ConflictRow(BaseModel):
    left_source: str
    right_source: str
    conflict: float


class IntegralAssessmentRow(BaseModel):
    """One line of the integral assessment table."""
    component_id: str
    indicator_id: str
    groups: List[str]
    tallies: List[GroupTally]
    focal: List[FocalRow] = Field(..., min_length=1)
    chosen_lo: float
    chosen_hi: float
    label: str
    label_score: float
    bel: float
    pl: float
    expected_lo: float
    expected_hi: float
    conflicts: List[ConflictRow]
    irrelevant_count: int = 0

    @model_validator(mode="after")
    def check_measures(self):
        if self.bel > self.pl + CHECK_TOLERANCE:
            raise ValueError(f"bel {self.bel} exceeds pl {self.pl}")
        if not any(
            abs(f.lo - self.chosen_lo) <= CHECK_TOLERANCE and abs(f.hi - self.chosen_hi) <= CHECK_TOLERANCE
            for f in self.focal
        ):
            raise ValueError("chosen interval is not a combined focal element")
        return self

    @property
    def responses(self) -> int:
        return sum(t.total for t in self.tallies)


class IntegralSummary(BaseModel):
    """Integral assessment of the whole system from the per-group appraisals."""
    index_lo: float
    index_hi: float
    index: float
    scalarization: str
    component_indices: Dict[str, float] = Field(default_factory=dict)


class AssessmentTable(BaseModel):
    rows: List[IntegralAssessmentRow]
    integral: Optional[IntegralSummary] = None


class CombinationSummary(BaseModel):
    source_order: List[str]
    focal: List[FocalRow]
    conflicts: List[ConflictRow]
    expected_lo: float
    expected_hi: float


class NoveltyRow(BaseModel):
    label: str
    year: Optional[int] = None
    gap: bool = False
    raw: Optional[float] = None
    clamped: Optional[float] = None
    marker_count: int = 0
    per_query_counts: List[int] = Field(default_factory=list)


class TrendRow(BaseModel):
    kind: str
    label: str = ""
    degree: Optional[int] = None
    coefficients: List[float]
    sse: float
    r2: float


class NoveltyReport(BaseModel):
    rows: List[NoveltyRow]
    group_mean: Optional[float] = None
    trends: List[TrendRow] = Field(default_factory=list)


class IndexReport(BaseModel):
    """Integral index with the demand indicator and the raw problem count."""
    index: float
    scalarization: str
    index_lo: Optional[float] = None
    index_hi: Optional[float] = None
    component_indices: Dict[str, float] = Field(default_factory=dict)
    demand: Optional[float] = None
    lf_d: Optional[int] = None
    lf: Optional[int] = None
    pr: Optional[int] = None
