# interval_scale.py - numeric intervals and the linguistic estimation scale

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError

from errors import InvalidInterval, InvalidScale, ParseError, UnknownTerm

# Bounds closer than this are the same bound.
TOLERANCE = 1e-9

DEFAULT_SCALE_PATH = Path(__file__).resolve().parent / "data" / "default_scale.json"


# ----------------
# Interval
# ----------------
@dataclass(frozen=True, order=True)
class Interval:
    """Closed subinterval [lo, hi] of [0, 1]. Points (lo == hi) are allowed."""
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (0.0 <= lo <= hi <= 1.0):
            raise InvalidInterval(f"invalid interval [{self.lo}, {self.hi}]: need 0 <= lo <= hi <= 1")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def unit(cls) -> "Interval":
        return cls(0.0, 1.0)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2.0

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def intersection(self, other: "Interval") -> Optional["Interval"]:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def intersects(self, other: "Interval") -> bool:
        return max(self.lo, other.lo) <= min(self.hi, other.hi)

    def contains(self, other: "Interval") -> bool:
        """True when other is a subset of self."""
        return self.lo <= other.lo and other.hi <= self.hi

    def same_as(self, other: "Interval", tolerance: float = TOLERANCE) -> bool:
        return abs(self.lo - other.lo) <= tolerance and abs(self.hi - other.hi) <= tolerance

    def __str__(self) -> str:
        return f"[{self.lo:.2f}, {self.hi:.2f}]"


# ----------------
# Linguistic terms
# ----------------
class BaseTerm(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    IRRELEVANT = "irrelevant"


class Modifier(str, Enum):
    STABLE = "stable"
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class LinguisticTerm:
    """A basic scale word, optionally refined by an auxiliary (dynamics) word."""
    base: BaseTerm
    modifier: Optional[Modifier] = None

    def __post_init__(self):
        if self.base == BaseTerm.IRRELEVANT and self.modifier is not None:
            raise UnknownTerm(f"'irrelevant' takes no modifier (got '{self.modifier.value}')")

    @classmethod
    def parse(cls, text: str) -> "LinguisticTerm":
        """
        Parse "high", "medium increasing", ... (case-insensitive, single space).

        Raises:
            UnknownTerm: if a word is not part of the vocabulary
        """
        words = (text or "").strip().lower().split()
        if not words or len(words) > 2:
            raise UnknownTerm(f"cannot parse linguistic term '{text}'")
        try:
            base = BaseTerm(words[0])
            modifier = Modifier(words[1]) if len(words) == 2 else None
        except ValueError:
            raise UnknownTerm(f"unknown linguistic term '{text}'") from None
        return cls(base, modifier)

    @property
    def is_irrelevant(self) -> bool:
        return self.base == BaseTerm.IRRELEVANT

    def __str__(self) -> str:
        if self.modifier is None:
            return self.base.value
        return f"{self.base.value} {self.modifier.value}"


TermLike = Union[LinguisticTerm, str]


def as_term(term: TermLike) -> LinguisticTerm:
    return term if isinstance(term, LinguisticTerm) else LinguisticTerm.parse(term)


class TermMatch(NamedTuple):
    term: LinguisticTerm
    score: float


# ----------------
# Scale
# ----------------
@dataclass(frozen=True)
class Scale:
    """Mapping of linguistic terms to intervals; immutable once built."""
    name: str
    entries: Tuple[Tuple[LinguisticTerm, Interval], ...]

    def __post_init__(self):
        seen: Dict[LinguisticTerm, Interval] = {}
        for term, interval in self.entries:
            if term in seen:
                raise InvalidScale(f"scale '{self.name}': duplicate term '{term}'")
            seen[term] = interval
        missing = [b.value for b in BaseTerm if LinguisticTerm(b) not in seen]
        if missing:
            raise InvalidScale(f"scale '{self.name}': missing base terms {missing}")
        object.__setattr__(self, "_lookup", seen)

    @classmethod
    def from_mapping(cls, name: str, mapping: Dict[TermLike, Interval]) -> "Scale":
        return cls(name, tuple((as_term(t), i) for t, i in mapping.items()))

    def __contains__(self, term: TermLike) -> bool:
        return as_term(term) in self._lookup

    def __len__(self) -> int:
        return len(self.entries)


def term_to_interval(scale: Scale, term: TermLike) -> Interval:
    """Interval bound to a term; UnknownTerm when the scale has no entry."""
    parsed = as_term(term)
    try:
        return scale._lookup[parsed]
    except KeyError:
        raise UnknownTerm(f"term '{parsed}' is not defined in scale '{scale.name}'") from None


def overlap_score(a: Interval, b: Interval, tolerance: float = TOLERANCE) -> float:
    """Length of intersection over length of union; points score 1 only on exact match."""
    if a.same_as(b, tolerance):
        return 1.0
    common = a.intersection(b)
    if common is None:
        return 0.0
    union_length = max(a.hi, b.hi) - min(a.lo, b.lo)
    if union_length <= 0.0:
        return 0.0
    return common.width / union_length


def interval_to_terms(
    scale: Scale,
    interval: Interval,
    tolerance: float = TOLERANCE,
) -> List[TermMatch]:
    """
    Rank the scale's terms by how well their intervals overlap the given one.

    Returns:
        TermMatch list, best first; ties are broken by term name. Terms with a
        zero score are left out.
    """
    matches = []
    for term, bound in scale.entries:
        score = overlap_score(interval, bound, tolerance)
        if score > 0.0:
            matches.append(TermMatch(term, score))
    matches.sort(key=lambda m: (-m.score, str(m.term)))
    return matches


# ----------------
# Scale file
# ----------------
class ScaleFileEntry(BaseModel):
    term: str = Field(..., min_length=1)
    lo: float
    hi: float


class ScaleFile(BaseModel):
    """On-disk shape: {"name": ..., "entries": [{"term", "lo", "hi"}, ...]}."""
    name: str = "custom"
    entries: List[ScaleFileEntry]


def scale_from_file_model(model: ScaleFile) -> Scale:
    entries = []
    for entry in model.entries:
        try:
            term = LinguisticTerm.parse(entry.term)
            interval = Interval(entry.lo, entry.hi)
        except (UnknownTerm, InvalidInterval) as e:
            raise InvalidScale(f"scale '{model.name}', term '{entry.term}': {e}") from None
        entries.append((term, interval))
    return Scale(model.name, tuple(entries))


def load_scale(path: Union[str, Path]) -> Scale:
    """
    Load and validate a scale file.

    Raises:
        ParseError: unreadable file, bad JSON or wrong document shape
        InvalidScale: bad intervals, unknown or duplicate terms, missing base terms
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(str(path), f"cannot read scale file: {e}") from None
    except json.JSONDecodeError as e:
        raise ParseError(str(path), f"invalid JSON: {e.msg}", line=e.lineno) from None

    try:
        model = ScaleFile.model_validate(raw)
    except ValidationError as e:
        raise ParseError(str(path), f"not a scale document: {e.errors()[0]['msg']}") from None

    return scale_from_file_model(model)


def default_scale() -> Scale:
    return load_scale(DEFAULT_SCALE_PATH)
