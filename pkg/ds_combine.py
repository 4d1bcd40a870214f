# ds_combine.py
# Dempster's rule over interval focal elements, folded pairwise over sources.

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, ValidationError

from errors import EmptyInput, InvalidEvidence, InvalidInterval, ParseError, TotalConflict
from evidence_core import EvidenceBody
from interval_scale import TOLERANCE, Interval

logger = logging.getLogger(__name__)

# Combination is undefined once the agreeing mass 1 - K drops to this level.
CONFLICT_THRESHOLD = 1e-12


@dataclass(frozen=True)
class PairConflict:
    left_source: str
    right_source: str
    conflict: float


@dataclass(frozen=True)
class CombinationReport:
    combined: EvidenceBody
    pair_conflicts: Tuple[PairConflict, ...]
    source_order: Tuple[str, ...]

    @property
    def total_conflicts(self) -> List[float]:
        return [p.conflict for p in self.pair_conflicts]


def intersect(a: Interval, b: Interval) -> Optional[Interval]:
    """[max lo, min hi] when the closed intervals meet, otherwise None."""
    return a.intersection(b)


def combine_pair(
    b1: EvidenceBody,
    b2: EvidenceBody,
    tolerance: float = TOLERANCE,
    conflict_threshold: float = CONFLICT_THRESHOLD,
) -> Tuple[EvidenceBody, float]:
    """
    Combine two independent bodies with Dempster's rule.

    Product masses of intersecting focal pairs accrue to the intersection;
    products of disjoint pairs make up the conflict K. Accrued masses are
    divided by 1 - K.

    Returns:
        (combined body, K)

    Raises:
        TotalConflict: when 1 - K <= conflict_threshold
    """
    accrued: List[Tuple[Interval, float]] = []
    conflict = 0.0
    agreement = 0.0

    for f1 in b1.focal:
        for f2 in b2.focal:
            product = f1.mass * f2.mass
            common = intersect(f1.interval, f2.interval)
            if common is None:
                conflict += product
            else:
                agreement += product
                accrued.append((common, product))

    # agreement equals 1 - K but carries less rounding than subtracting K
    if agreement <= conflict_threshold:
        raise TotalConflict(b1.source_id, b2.source_id, conflict)

    source_id = f"{b1.source_id}+{b2.source_id}"
    combined = EvidenceBody.build(
        source_id,
        ((interval, mass / agreement) for interval, mass in accrued),
        tolerance,
    )
    return combined, conflict


def combine_all(
    bodies: Sequence[EvidenceBody],
    tolerance: float = TOLERANCE,
    conflict_threshold: float = CONFLICT_THRESHOLD,
) -> CombinationReport:
    """
    Left fold of combine_pair in input order: the first two sources form a
    conditional source which is then combined with the next actual source.

    Raises:
        EmptyInput: no bodies
        TotalConflict: names the accumulated source and the source it clashed with
    """
    if not bodies:
        raise EmptyInput("combine_all needs at least one evidence body")

    combined = bodies[0]
    conflicts: List[PairConflict] = []

    for body in bodies[1:]:
        left = combined.source_id
        combined, conflict = combine_pair(combined, body, tolerance, conflict_threshold)
        conflicts.append(PairConflict(left, body.source_id, conflict))
        logger.debug(f"Combined '{left}' with '{body.source_id}': K={conflict:.6f}")

    return CombinationReport(
        combined=combined,
        pair_conflicts=tuple(conflicts),
        source_order=tuple(b.source_id for b in bodies),
    )


# ----------------
# Evidence-body file
# ----------------
class FocalEntry(BaseModel):
    lo: float
    hi: float
    mass: float = Field(..., gt=0.0)


class SourceEntry(BaseModel):
    id: str = Field(..., min_length=1)
    focal: List[FocalEntry] = Field(..., min_length=1)


class BodiesFile(BaseModel):
    """On-disk shape: {"sources": [{"id": ..., "focal": [{"lo", "hi", "mass"}, ...]}, ...]}."""
    sources: List[SourceEntry] = Field(..., min_length=1)


def load_bodies(path: Union[str, Path], tolerance: float = TOLERANCE) -> List[EvidenceBody]:
    """
    Read evidence bodies for the standalone combine command.

    Raises:
        ParseError: unreadable file or wrong document shape
        InvalidEvidence: invalid intervals, masses not summing to 1, repeated source ids
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        model = BodiesFile.model_validate(raw)
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(str(path), f"cannot read evidence file: {e}") from None
    except json.JSONDecodeError as e:
        raise ParseError(str(path), f"invalid JSON: {e.msg}", line=e.lineno) from None
    except ValidationError as e:
        raise ParseError(str(path), f"not an evidence document: {e.errors()[0]['msg']}") from None

    bodies = []
    seen = set()
    for source in model.sources:
        if source.id in seen:
            raise InvalidEvidence(f"{path}: source id '{source.id}' appears twice")
        seen.add(source.id)
        try:
            pairs = [(Interval(f.lo, f.hi), f.mass) for f in source.focal]
        except InvalidInterval as e:
            raise InvalidEvidence(f"{path}: source '{source.id}': {e}") from None
        bodies.append(EvidenceBody.build(source.id, pairs, tolerance))
    return bodies
