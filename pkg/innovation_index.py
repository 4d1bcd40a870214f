# innovation_index.py
# Weighted integral innovation index, demand indicator and problem count.

import csv
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from errors import (
    IncompleteGrid,
    InvalidInput,
    InvalidInterval,
    InvalidWeights,
    ParseError,
    WeightMismatch,
    ZeroTotal,
)
from ds_measures import expected_interval
from evidence_core import bpa, tally_responses
from interval_scale import TOLERANCE, Interval, Scale

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-9

# (indicator, group, component)
Cell = Tuple[str, str, str]
CellValue = Union[float, Interval]


class Scalarization(str, Enum):
    """How an appraisal interval becomes the scalar V of the index."""
    MIDPOINT = "midpoint"
    LOWER = "lower"
    UPPER = "upper"


def scalarize(interval: Interval, mode: Scalarization = Scalarization.MIDPOINT) -> float:
    mode = Scalarization(mode)
    if mode == Scalarization.LOWER:
        return interval.lo
    if mode == Scalarization.UPPER:
        return interval.hi
    return interval.midpoint


# ----------------
# Weights
# ----------------
def _check_weights(name: str, weights: Dict[str, float]) -> None:
    if not weights:
        raise InvalidWeights(f"{name} weights are empty")
    negative = [k for k, w in weights.items() if w < 0]
    if negative:
        raise InvalidWeights(f"{name} weights must be non-negative: {sorted(negative)}")
    total = sum(weights.values())
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise InvalidWeights(f"{name} weights sum to {total:.12f}, not 1")


@dataclass(frozen=True)
class WeightSpec:
    """Per-dimension weights; w_{i,j,k} factorizes as w_i * w_j * w_k."""
    w_components: Dict[str, float] = field(hash=False)
    w_groups: Dict[str, float] = field(hash=False)
    w_indicators: Dict[str, float] = field(hash=False)

    def __post_init__(self):
        _check_weights("component", self.w_components)
        _check_weights("group", self.w_groups)
        _check_weights("indicator", self.w_indicators)

    @classmethod
    def uniform(
        cls,
        components: Iterable[str],
        groups: Iterable[str],
        indicators: Iterable[str],
    ) -> "WeightSpec":
        def even(keys):
            keys = sorted(set(keys))
            return {k: 1.0 / len(keys) for k in keys}

        return cls(even(components), even(groups), even(indicators))

    def restricted_to(self, components: Sequence[str]) -> "WeightSpec":
        """Component weights renormalized over a subset of components."""
        unknown = [c for c in components if c not in self.w_components]
        if unknown:
            raise WeightMismatch(f"no weights for components {sorted(unknown)}")
        total = sum(self.w_components[c] for c in components)
        if total <= 0.0:
            raise WeightMismatch(f"components {sorted(components)} carry zero total weight")
        subset = {c: self.w_components[c] / total for c in components}
        return WeightSpec(subset, dict(self.w_groups), dict(self.w_indicators))


# ----------------
# Value grid
# ----------------
@dataclass(frozen=True)
class ValueGrid:
    """
    V_{i,j,k} over declared indicator, group and component sets. Cells are
    either all scalars or all intervals (interval mode).
    """
    values: Dict[Cell, CellValue] = field(hash=False)
    indicators: Tuple[str, ...] = ()
    groups: Tuple[str, ...] = ()
    components: Tuple[str, ...] = ()

    def __post_init__(self):
        declared = (
            ("indicators", 0),
            ("groups", 1),
            ("components", 2),
        )
        for name, axis in declared:
            current = getattr(self, name)
            ids = current if current else {cell[axis] for cell in self.values}
            object.__setattr__(self, name, tuple(sorted(set(ids))))

        kinds = {isinstance(v, Interval) for v in self.values.values()}
        if len(kinds) > 1:
            raise InvalidInput("grid mixes scalar and interval values")
        for cell, value in self.values.items():
            if not isinstance(value, Interval) and not (0.0 <= value <= 1.0):
                raise InvalidInput(f"grid value {value} at {cell} is outside [0, 1]")

        declared_cells = set(self.cells())
        missing = [cell for cell in self.cells() if cell not in self.values]
        if missing:
            raise IncompleteGrid(f"grid has no value for {len(missing)} cell(s), first {missing[0]}")
        extra = sorted(cell for cell in self.values if cell not in declared_cells)
        if extra:
            raise IncompleteGrid(f"grid value outside declared index sets at {extra[0]}")

    @property
    def interval_mode(self) -> bool:
        return any(isinstance(v, Interval) for v in self.values.values())

    def cells(self) -> List[Cell]:
        return list(product(self.indicators, self.groups, self.components))

    def restricted_to(self, components: Sequence[str]) -> "ValueGrid":
        keep = set(components)
        return ValueGrid(
            {cell: v for cell, v in self.values.items() if cell[2] in keep},
            self.indicators,
            self.groups,
            tuple(sorted(keep)),
        )

    def as_array(self, mode: Scalarization = Scalarization.MIDPOINT) -> np.ndarray:
        """Values as an (I, J, K) array; intervals are scalarized."""
        array = np.empty((len(self.indicators), len(self.groups), len(self.components)))
        for i, indicator in enumerate(self.indicators):
            for j, group in enumerate(self.groups):
                for k, component in enumerate(self.components):
                    value = self.values[(indicator, group, component)]
                    array[i, j, k] = scalarize(value, mode) if isinstance(value, Interval) else value
        return array


@dataclass(frozen=True)
class DemandInput:
    lf_d: int
    lf: int
    pr: int = 0

    def __post_init__(self):
        if self.lf_d < 0 or self.lf < 0 or self.pr < 0:
            raise InvalidInput("labour function and problem counts must be non-negative")
        if self.lf_d > self.lf:
            raise InvalidInput(f"lf_d={self.lf_d} exceeds lf={self.lf}")


# ----------------
# Index operations
# ----------------
def _check_index_sets(grid: ValueGrid, weights: WeightSpec) -> None:
    pairs = (
        ("indicator", grid.indicators, weights.w_indicators),
        ("group", grid.groups, weights.w_groups),
        ("component", grid.components, weights.w_components),
    )
    for name, grid_ids, weight_map in pairs:
        if set(grid_ids) != set(weight_map):
            raise WeightMismatch(
                f"{name} ids differ: grid {sorted(grid_ids)} vs weights {sorted(weight_map)}"
            )


def integral_index(
    grid: ValueGrid,
    weights: WeightSpec,
    mode: Scalarization = Scalarization.MIDPOINT,
    components: Optional[Sequence[str]] = None,
) -> float:
    """
    In = sum_k sum_j sum_i w_i w_j w_k V_{i,j,k}.

    Args:
        grid: complete value grid; interval cells are scalarized with mode
        weights: weights over exactly the grid's index sets
        components: optional subset; component weights are renormalized over it

    Raises:
        WeightMismatch: grid and weight index sets differ
    """
    _check_index_sets(grid, weights)
    if components is not None:
        grid = grid.restricted_to(components)
        weights = weights.restricted_to(components)

    w_i = np.array([weights.w_indicators[i] for i in grid.indicators])
    w_j = np.array([weights.w_groups[j] for j in grid.groups])
    w_k = np.array([weights.w_components[k] for k in grid.components])
    value = float(np.einsum("i,j,k,ijk->", w_i, w_j, w_k, grid.as_array(mode)))
    return min(max(value, 0.0), 1.0)


def integral_index_interval(
    grid: ValueGrid,
    weights: WeightSpec,
    components: Optional[Sequence[str]] = None,
) -> Interval:
    """Index of the lower-bound grid and of the upper-bound grid."""
    lo = integral_index(grid, weights, Scalarization.LOWER, components)
    hi = integral_index(grid, weights, Scalarization.UPPER, components)
    return Interval(lo, max(lo, hi))


def component_indices(
    grid: ValueGrid,
    weights: WeightSpec,
    mode: Scalarization = Scalarization.MIDPOINT,
) -> Dict[str, float]:
    """In of each component on its own."""
    return {
        component: integral_index(grid, weights, mode, components=[component])
        for component in grid.components
    }


def demand(demand_input: DemandInput) -> float:
    """Demand = LF_d / LF."""
    if demand_input.lf == 0:
        raise ZeroTotal("demand is undefined when the total number of labour functions is 0")
    return demand_input.lf_d / demand_input.lf


def grid_from_survey(records, scale: Scale, tolerance: float = TOLERANCE) -> ValueGrid:
    """
    Interval-mode grid whose cell (indicator, group, component) is the expected
    interval of that group's mass assignment.

    Raises:
        IncompleteGrid: some group gave no responses for some (component, indicator)
    """
    keys = sorted({r.key for r in records})
    values: Dict[Cell, CellValue] = {}
    for key in keys:
        tally = tally_responses(records, key)
        body = bpa(tally, scale, tolerance)
        values[(key.indicator_id, key.group_id, key.component_id)] = expected_interval(body).as_interval()

    skipped = [
        (indicator, group, component)
        for indicator, group, component in product(
            sorted({k.indicator_id for k in keys}),
            sorted({k.group_id for k in keys}),
            sorted({k.component_id for k in keys}),
        )
        if (indicator, group, component) not in values
    ]
    if skipped:
        indicator, group, component = skipped[0]
        raise IncompleteGrid(
            f"group '{group}' has no responses for {component}/{indicator} "
            f"({len(skipped)} cell(s) missing); the index needs every group to rate every cell"
        )
    return ValueGrid(values)


# ----------------
# Files
# ----------------
class WeightsFile(BaseModel):
    """On-disk shape: {"components": {...}, "groups": {...}, "indicators": {...}}."""
    components: Dict[str, float] = Field(..., min_length=1)
    groups: Dict[str, float] = Field(..., min_length=1)
    indicators: Dict[str, float] = Field(..., min_length=1)


def load_weights(path: Union[str, Path]) -> WeightSpec:
    path = Path(path)
    try:
        model = WeightsFile.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(str(path), f"cannot read weights file: {e}") from None
    except json.JSONDecodeError as e:
        raise ParseError(str(path), f"invalid JSON: {e.msg}", line=e.lineno) from None
    except ValidationError as e:
        raise ParseError(str(path), f"not a weights document: {e.errors()[0]['msg']}") from None
    return WeightSpec(model.components, model.groups, model.indicators)


def parse_cell_value(text: str) -> CellValue:
    """'0.5' -> 0.5, '0.4..0.6' -> Interval(0.4, 0.6)."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        return Interval(float(lo), float(hi))
    return float(text)


def load_grid(path: Union[str, Path]) -> ValueGrid:
    """
    Read a CSV grid with header indicator,group,component,value.

    Raises:
        ParseError: unreadable file, missing columns, bad values, repeated cells
        IncompleteGrid: missing cells
    """
    path = Path(path)
    values: Dict[Cell, CellValue] = {}
    try:
        with path.open(newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            header = [h.strip() for h in (reader.fieldnames or [])]
            missing = [c for c in ("indicator", "group", "component", "value") if c not in header]
            if missing:
                raise ParseError(str(path), f"missing columns {missing}", line=1)
            reader.fieldnames = header

            for line_num, row in enumerate(reader, start=2):
                if None in row:
                    raise ParseError(str(path), f"more fields than the {len(header)} in the header", line=line_num)
                if all((v or "").strip() == "" for v in row.values()):
                    continue
                cell = (
                    (row.get("indicator") or "").strip(),
                    (row.get("group") or "").strip(),
                    (row.get("component") or "").strip(),
                )
                if not all(cell):
                    raise ParseError(str(path), "empty index field", line=line_num)
                if cell in values:
                    raise ParseError(str(path), f"cell {cell} appears twice", line=line_num)
                try:
                    values[cell] = parse_cell_value(row.get("value") or "")
                except (ValueError, InvalidInterval) as e:
                    raise ParseError(str(path), f"bad value: {e}", line=line_num) from None
    except (OSError, UnicodeDecodeError, csv.Error) as e:
        raise ParseError(str(path), f"cannot read grid: {e}") from None

    if not values:
        raise IncompleteGrid(f"{path}: grid is empty")
    return ValueGrid(values)
