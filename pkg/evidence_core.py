# evidence_core.py
# Expert responses -> evidence tables -> basic probability assignments.

import csv
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from errors import (
    DuplicateResponse,
    EmptyGroup,
    InvalidEvidence,
    InvalidInput,
    ParseError,
    UnknownTerm,
)
from interval_scale import TOLERANCE, Interval, LinguisticTerm, Scale, term_to_interval

logger = logging.getLogger(__name__)

# Masses must sum to one within this bound.
MASS_TOLERANCE = 1e-9

SURVEY_COLUMNS = ("component", "indicator", "group", "expert", "term")


# ----------------
# Survey records
# ----------------
@dataclass(frozen=True, order=True)
class AssessmentKey:
    component_id: str
    indicator_id: str
    group_id: str

    def __post_init__(self):
        for name in ("component_id", "indicator_id", "group_id"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise InvalidInput(f"AssessmentKey.{name} must be a non-empty string")
            object.__setattr__(self, name, value.strip())

    @property
    def cell(self) -> Tuple[str, str]:
        """(component, indicator) pair the key contributes to."""
        return (self.component_id, self.indicator_id)

    def __str__(self) -> str:
        return f"{self.component_id}/{self.indicator_id}/{self.group_id}"


@dataclass(frozen=True)
class ResponseRecord:
    key: AssessmentKey
    expert_id: str
    term: LinguisticTerm


@dataclass(frozen=True)
class ResponseTally:
    """Counts C_i of each term within one group; total is N_i."""
    key: AssessmentKey
    counts: Dict[LinguisticTerm, int] = field(hash=False)
    total: int

    def __post_init__(self):
        if self.total < 1:
            raise EmptyGroup(f"{self.key}: a tally needs at least one response")
        if any(c < 1 for c in self.counts.values()):
            raise InvalidInput(f"{self.key}: tally counts must be positive")
        if sum(self.counts.values()) != self.total:
            raise InvalidInput(f"{self.key}: counts sum to {sum(self.counts.values())}, total is {self.total}")

    def sorted_counts(self) -> List[Tuple[LinguisticTerm, int]]:
        return sorted(self.counts.items(), key=lambda item: str(item[0]))

    @property
    def irrelevant_count(self) -> int:
        return sum(c for t, c in self.counts.items() if t.is_irrelevant)


# ----------------
# Evidence bodies
# ----------------
@dataclass(frozen=True)
class FocalElement:
    interval: Interval
    mass: float


def _merge_focal(
    pairs: Iterable[Tuple[Interval, float]],
    tolerance: float,
) -> List[FocalElement]:
    merged: List[List] = []
    for interval, mass in pairs:
        for slot in merged:
            if slot[0].same_as(interval, tolerance):
                slot[1] += mass
                break
        else:
            merged.append([interval, float(mass)])
    merged.sort(key=lambda slot: (slot[0].lo, slot[0].hi))
    return [FocalElement(interval, mass) for interval, mass in merged]


@dataclass(frozen=True)
class EvidenceBody:
    """
    Focal elements of one evidence source. Equal intervals are merged on
    construction and focal elements are kept ordered by (lo, hi).
    """
    source_id: str
    focal: Tuple[FocalElement, ...]

    def __post_init__(self):
        focal = _merge_focal(((f.interval, f.mass) for f in self.focal), TOLERANCE)
        if not focal:
            raise InvalidEvidence(f"source '{self.source_id}': no focal elements")
        for element in focal:
            if not element.mass > 0.0:
                raise InvalidEvidence(
                    f"source '{self.source_id}': mass of {element.interval} must be positive"
                )
        total = sum(f.mass for f in focal)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise InvalidEvidence(f"source '{self.source_id}': masses sum to {total:.12f}, not 1")
        object.__setattr__(self, "focal", tuple(focal))

    @classmethod
    def build(
        cls,
        source_id: str,
        pairs: Iterable[Tuple[Interval, float]],
        tolerance: float = TOLERANCE,
    ) -> "EvidenceBody":
        """Build a body from (interval, mass) pairs, merging intervals equal within tolerance."""
        return cls(source_id, tuple(_merge_focal(pairs, tolerance)))

    @classmethod
    def vacuous(cls, source_id: str = "vacuous") -> "EvidenceBody":
        """Total ignorance: all mass on [0, 1]."""
        return cls(source_id, (FocalElement(Interval.unit(), 1.0),))

    @property
    def intervals(self) -> List[Interval]:
        return [f.interval for f in self.focal]

    def mass_of(self, interval: Interval, tolerance: float = TOLERANCE) -> float:
        for element in self.focal:
            if element.interval.same_as(interval, tolerance):
                return element.mass
        return 0.0

    def __iter__(self) -> Iterator[FocalElement]:
        return iter(self.focal)

    def __len__(self) -> int:
        return len(self.focal)


# ----------------
# Tally and mass assignment
# ----------------
def tally_responses(records: Sequence[ResponseRecord], key: AssessmentKey) -> ResponseTally:
    """
    Combine equal assessments of one (component, indicator, group) key.

    Raises:
        EmptyGroup: no record matches the key
        DuplicateResponse: an expert answered the same key twice
    """
    experts = set()
    counts: Counter = Counter()
    for record in records:
        if record.key != key:
            continue
        if record.expert_id in experts:
            raise DuplicateResponse(f"{key}: expert '{record.expert_id}' answered more than once")
        experts.add(record.expert_id)
        counts[record.term] += 1

    if not counts:
        raise EmptyGroup(f"{key}: no responses")

    return ResponseTally(key=key, counts=dict(counts), total=sum(counts.values()))


def bpa(tally: ResponseTally, scale: Scale, tolerance: float = TOLERANCE) -> EvidenceBody:
    """m(A_i) = C_i / N_i for every distinct term interval of the tally."""
    pairs = [
        (term_to_interval(scale, term), count / tally.total)
        for term, count in tally.sorted_counts()
    ]
    return EvidenceBody.build(tally.key.group_id, pairs, tolerance)


def group_records(records: Iterable[ResponseRecord]) -> Dict[Tuple[str, str], List[str]]:
    """(component, indicator) -> sorted list of groups that answered it."""
    cells: Dict[Tuple[str, str], set] = {}
    for record in records:
        cells.setdefault(record.key.cell, set()).add(record.key.group_id)
    return {cell: sorted(groups) for cell, groups in sorted(cells.items())}


def check_unique(records: Iterable[ResponseRecord]) -> None:
    seen = set()
    for record in records:
        marker = (record.key, record.expert_id)
        if marker in seen:
            raise DuplicateResponse(f"{record.key}: expert '{record.expert_id}' answered more than once")
        seen.add(marker)


# ----------------
# Survey CSV
# ----------------
def load_survey(
    path: Union[str, Path],
    scale_name: Optional[str] = None,
) -> List[ResponseRecord]:
    """
    Read a survey CSV with header component,indicator,group,expert,term and an
    optional scale column.

    Args:
        path: CSV file
        scale_name: name of the scale in use; rows naming another scale are logged

    Raises:
        ParseError: unreadable file, missing columns, unparseable term
        InvalidInput: rows refer to more than one estimation scale
        DuplicateResponse: repeated (key, expert)
    """
    path = Path(path)
    records: List[ResponseRecord] = []
    scales_seen = set()

    try:
        with path.open(newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            header = [h.strip() for h in (reader.fieldnames or [])]
            missing = [c for c in SURVEY_COLUMNS if c not in header]
            if missing:
                raise ParseError(str(path), f"missing columns {missing}", line=1)
            reader.fieldnames = header

            for line_num, row in enumerate(reader, start=2):
                if None in row:
                    raise ParseError(str(path), f"more fields than the {len(header)} in the header", line=line_num)
                # Skip completely empty rows
                if all((v or "").strip() == "" for v in row.values()):
                    logger.debug(f"Skipping empty row at {path}:{line_num}")
                    continue

                values = {c: (row.get(c) or "").strip() for c in SURVEY_COLUMNS}
                blank = [c for c, v in values.items() if not v]
                if blank:
                    raise ParseError(str(path), f"empty fields {blank}", line=line_num)

                try:
                    key = AssessmentKey(values["component"], values["indicator"], values["group"])
                    term = LinguisticTerm.parse(values["term"])
                except (InvalidInput, UnknownTerm) as e:
                    raise ParseError(str(path), str(e), line=line_num) from None

                scale_value = (row.get("scale") or "").strip()
                if scale_value:
                    scales_seen.add(scale_value)

                records.append(ResponseRecord(key=key, expert_id=values["expert"], term=term))
    except (OSError, UnicodeDecodeError, csv.Error) as e:
        raise ParseError(str(path), f"cannot read survey: {e}") from None

    if len(scales_seen) > 1:
        raise InvalidInput(f"{path}: responses mix estimation scales {sorted(scales_seen)}")
    if scales_seen and scale_name and scale_name not in scales_seen:
        logger.warning(f"Survey {path} names scale {sorted(scales_seen)[0]!r}, using {scale_name!r}")

    check_unique(records)
    logger.info(f"Loaded {len(records)} responses from {path}")
    return records
