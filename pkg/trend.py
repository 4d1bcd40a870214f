# trend.py
# Least-squares trend models over (x, y) series: linear, power, exponential, polynomial.

import csv
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import DegreeTooHigh, DomainError, InvalidInput, ParseError

logger = logging.getLogger(__name__)

DEFAULT_DEGREE = 3
MAX_DEGREE = 5


class TrendKind(str, Enum):
    LINEAR = "linear"
    POWER = "power"
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class Series:
    """Points with strictly increasing x; at least two of them."""
    points: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        points = tuple((float(x), float(y)) for x, y in self.points)
        if len(points) < 2:
            raise InvalidInput("a series needs at least 2 points")
        for (x0, _), (x1, _) in zip(points, points[1:]):
            if not x1 > x0:
                raise InvalidInput(f"series x values must be strictly increasing ({x0} then {x1})")
        object.__setattr__(self, "points", points)

    @classmethod
    def from_years(cls, points: Sequence[Tuple[int, float]]) -> "Series":
        """Shift years so the first one becomes x = 1."""
        if not points:
            raise InvalidInput("a series needs at least 2 points")
        first = points[0][0]
        return cls(tuple((year - first + 1, y) for year, y in points))

    @property
    def x(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def y(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class TrendModel:
    """
    Coefficient order:
        linear       (slope, intercept)            y = slope*x + intercept
        power        (a, b)                        y = a * x**b
        exponential  (a, b)                        y = a * exp(b*x)
        polynomial   highest power first           y = c0*x**d + ... + cd
    """
    kind: TrendKind
    coefficients: Tuple[float, ...]
    sse: float
    r2: float

    def __post_init__(self):
        if self.kind == TrendKind.POLYNOMIAL:
            if not 2 <= len(self.coefficients) <= MAX_DEGREE + 1:
                raise InvalidInput(f"polynomial model needs 2 to {MAX_DEGREE + 1} coefficients, got {len(self.coefficients)}")
        elif len(self.coefficients) != 2:
            raise InvalidInput(f"{self.kind.value} model needs 2 coefficients, got {len(self.coefficients)}")

    @property
    def degree(self) -> Optional[int]:
        if self.kind == TrendKind.POLYNOMIAL:
            return len(self.coefficients) - 1
        return None


def evaluate(model: TrendModel, x: float) -> float:
    """Model prediction at x; DomainError for power models at x <= 0."""
    c = model.coefficients
    if model.kind == TrendKind.LINEAR:
        return c[0] * x + c[1]
    if model.kind == TrendKind.POWER:
        if x <= 0:
            raise DomainError(f"power model is undefined at x={x}")
        return c[0] * x ** c[1]
    if model.kind == TrendKind.EXPONENTIAL:
        return c[0] * float(np.exp(c[1] * x))
    return float(np.polyval(c, x))


def _goodness(model_kind: TrendKind, coefficients: Tuple[float, ...], series: Series) -> TrendModel:
    provisional = TrendModel(model_kind, coefficients, 0.0, 0.0)
    predicted = np.array([evaluate(provisional, x) for x in series.x])
    y = series.y
    sse = float(np.sum((y - predicted) ** 2))
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst > 0.0:
        r2 = 1.0 - sse / sst
    else:
        # constant y: a perfect fit explains everything there is
        r2 = 1.0 if sse < 1e-12 else 0.0
    return TrendModel(model_kind, coefficients, sse, r2)


def fit(series: Series, kind: Union[TrendKind, str], degree: int = DEFAULT_DEGREE) -> TrendModel:
    """
    Least-squares fit. Power and exponential models are fitted as straight
    lines through log-transformed data; sse and r2 are measured on the
    original scale.

    Raises:
        DomainError: non-positive data under a log transform
        DegreeTooHigh: polynomial degree not below the number of points
    """
    kind = TrendKind(kind)
    x, y = series.x, series.y

    if kind == TrendKind.LINEAR:
        slope, intercept = np.polyfit(x, y, 1)
        coefficients = (float(slope), float(intercept))
    elif kind == TrendKind.POWER:
        if np.any(x <= 0) or np.any(y <= 0):
            raise DomainError("power fit needs x > 0 and y > 0")
        b, log_a = np.polyfit(np.log(x), np.log(y), 1)
        coefficients = (float(np.exp(log_a)), float(b))
    elif kind == TrendKind.EXPONENTIAL:
        if np.any(y <= 0):
            raise DomainError("exponential fit needs y > 0")
        b, log_a = np.polyfit(x, np.log(y), 1)
        coefficients = (float(np.exp(log_a)), float(b))
    else:
        if not 1 <= degree <= MAX_DEGREE:
            raise InvalidInput(f"polynomial degree must be between 1 and {MAX_DEGREE}, got {degree}")
        if degree >= len(series):
            raise DegreeTooHigh(f"degree {degree} needs more than {len(series)} points")
        coefficients = tuple(float(c) for c in np.polyfit(x, y, degree))

    model = _goodness(kind, coefficients, series)
    logger.debug(f"Fitted {kind.value}: coefficients={model.coefficients}, sse={model.sse:.3g}")
    return model


def fit_all(series: Series, degree: int = DEFAULT_DEGREE) -> List[TrendModel]:
    """Every kind the data admits, best (lowest sse) first."""
    order = list(TrendKind)
    models = []
    for kind in order:
        try:
            models.append(fit(series, kind, degree))
        except (DomainError, DegreeTooHigh) as e:
            logger.warning(f"Skipping {kind.value} trend: {e}")
    if not models:
        raise DomainError("no trend kind can be fitted to this series")
    models.sort(key=lambda m: (m.sse, order.index(m.kind)))
    return models


def load_series(path: Union[str, Path], years: bool = False) -> Series:
    """
    Read a CSV with header x,y. A header year,y (or years=True) marks the
    first column as calendar years, shifted so the first one becomes x = 1.
    """
    path = Path(path)
    points = []
    try:
        with path.open(newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            header = [h.strip() for h in (reader.fieldnames or [])]
            x_column = "year" if "year" in header and "x" not in header else "x"
            if x_column not in header or "y" not in header:
                raise ParseError(str(path), "header must contain x (or year) and y", line=1)
            years = years or x_column == "year"
            reader.fieldnames = header
            for line_num, row in enumerate(reader, start=2):
                if None in row:
                    raise ParseError(str(path), f"more fields than the {len(header)} in the header", line=line_num)
                if all((v or "").strip() == "" for v in row.values()):
                    continue
                try:
                    points.append((float(row[x_column]), float(row["y"])))
                except (TypeError, ValueError):
                    raise ParseError(str(path), f"bad point {row.get(x_column)!r},{row.get('y')!r}", line=line_num) from None
    except (OSError, UnicodeDecodeError, csv.Error) as e:
        raise ParseError(str(path), f"cannot read series: {e}") from None
    if years:
        return Series.from_years(points)
    return Series(tuple(points))
