"""Shuffle-of-min structures.

A structure is a finite list of hypercube cells; cell i carries one closed
interval J_i^k per axis k and puts its mass lambda_i = |J_i^k| either on the
cell diagonal (base MIN) or spread uniformly (base INDEPENDENCE). The four
validity conditions are checked exactly by `validate`; `evaluate_shuffle`
refuses structures that fail them.

Two builders are provided: the C* structure cut at the hyperplanes
lambda_k = sum_{i<=k} (1 - u*_i), and the even-dimensional family whose
maximal points u(delta) fill the manifold of extremal points.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from copula import Coords, CopulaTerm, UnitPoint, as_point, PointLike, u_star
from errors import (DimensionMismatchError, InvalidStructureError, PreconditionError,
                    RationalParseError)
from rationals import RationalLike, format_rational, format_vector, to_rational

logger = logging.getLogger("Shuffle")

_ZERO = Fraction(0)
_ONE = Fraction(1)


class BaseCopula(Enum):
    MIN = "min"
    INDEPENDENCE = "independence"


class Condition(Enum):
    FINITE_INDEX = "finite_index"
    AT_MOST_ONE_ENDPOINT = "at_most_one_endpoint"
    HYPERCUBE = "hypercube"
    LENGTHS_SUM_TO_ONE = "lengths_sum_to_one"


@dataclass(frozen=True)
class Interval:
    """A closed interval [lower, upper] inside [0, 1]."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        lower, upper = to_rational(self.lower), to_rational(self.upper)
        if not _ZERO <= lower <= upper <= _ONE:
            raise InvalidStructureError(f"[{lower}, {upper}] is not an interval inside [0, 1]")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def length(self) -> Fraction:
        return self.upper - self.lower

    def overlap(self, other: "Interval") -> Fraction:
        """Length of the intersection (0 when they meet in at most one point)."""
        return max(_ZERO, min(self.upper, other.upper) - max(self.lower, other.lower))

    def __str__(self) -> str:
        return f"[{format_rational(self.lower)}, {format_rational(self.upper)}]"


@dataclass(frozen=True)
class Cell:
    intervals: Tuple[Interval, ...]
    base: BaseCopula = BaseCopula.MIN

    def __post_init__(self):
        intervals = tuple(self.intervals)
        if not intervals:
            raise PreconditionError("a cell needs one interval per axis, got none")
        object.__setattr__(self, "intervals", intervals)

    @property
    def mass(self) -> Fraction:
        return self.intervals[0].length

    @property
    def corner(self) -> Coords:
        """Left endpoints a^1, ..., a^d."""
        return tuple(interval.lower for interval in self.intervals)


@dataclass(frozen=True)
class ShuffleStructure:
    dim: int
    cells: Tuple[Cell, ...]

    def __post_init__(self):
        cells = tuple(self.cells)
        object.__setattr__(self, "cells", cells)
        if self.dim < 2:
            raise PreconditionError(f"shuffle structures need d >= 2, got d={self.dim}")
        for index, cell in enumerate(cells, start=1):
            if len(cell.intervals) != self.dim:
                raise DimensionMismatchError(
                    f"cell {index} has {len(cell.intervals)} intervals, expected {self.dim}")

    @property
    def total_mass(self) -> Fraction:
        return sum((cell.mass for cell in self.cells), _ZERO)

    def with_base(self, base: BaseCopula) -> "ShuffleStructure":
        return ShuffleStructure(self.dim, tuple(Cell(cell.intervals, base) for cell in self.cells))


@dataclass(frozen=True)
class ConditionResult:
    condition: Condition
    passed: bool
    witness: Optional[Dict[str, Any]] = None


@dataclass(frozen=True)
class ValidationReport:
    results: Tuple[ConditionResult, ...]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def result(self, condition: Condition) -> ConditionResult:
        return next(r for r in self.results if r.condition == condition)

    def first_failure(self) -> Optional[ConditionResult]:
        return next((r for r in self.results if not r.passed), None)


def validate(S: ShuffleStructure) -> ValidationReport:
    """Check the four shuffling-structure conditions exactly.

    1. the index set is finite (and here non-empty);
    2. on every axis, two distinct cells' intervals share at most one point;
    3. within a cell all interval lengths are equal (the cell is a hypercube);
    4. on every axis the interval lengths sum to 1.
    """
    results = [ConditionResult(Condition.FINITE_INDEX, len(S.cells) > 0,
                               None if S.cells else {"cells": 0})]

    overlap_witness = None
    for axis in range(S.dim):
        for first in range(len(S.cells)):
            for second in range(first + 1, len(S.cells)):
                a = S.cells[first].intervals[axis]
                b = S.cells[second].intervals[axis]
                if a.overlap(b) > 0:
                    overlap_witness = {"axis": axis + 1, "cells": (first + 1, second + 1),
                                       "intervals": (str(a), str(b))}
                    break
            if overlap_witness:
                break
        if overlap_witness:
            break
    results.append(ConditionResult(Condition.AT_MOST_ONE_ENDPOINT, overlap_witness is None,
                                   overlap_witness))

    cube_witness = None
    for index, cell in enumerate(S.cells, start=1):
        for axis, interval in enumerate(cell.intervals, start=1):
            if interval.length != cell.mass:
                cube_witness = {"cell": index, "axis": axis, "length": interval.length,
                                "expected": cell.mass}
                break
        if cube_witness:
            break
    results.append(ConditionResult(Condition.HYPERCUBE, cube_witness is None, cube_witness))

    sum_witness = None
    for axis in range(S.dim):
        total = sum((cell.intervals[axis].length for cell in S.cells), _ZERO)
        if total != _ONE:
            sum_witness = {"axis": axis + 1, "sum": total}
            break
    results.append(ConditionResult(Condition.LENGTHS_SUM_TO_ONE, sum_witness is None, sum_witness))
    return ValidationReport(tuple(results))


@lru_cache(maxsize=128)
def _validated(S: ShuffleStructure) -> bool:
    return validate(S).passed


def _cell_value(cell: Cell, coords: Coords) -> Fraction:
    mass = cell.mass
    if mass == 0:
        return _ZERO
    if cell.base is BaseCopula.MIN:
        smallest = mass
        for c, interval in zip(coords, cell.intervals):
            x = c - interval.lower
            if x <= 0:
                return _ZERO
            if x < smallest:
                smallest = x
        return smallest
    product = mass
    for c, interval in zip(coords, cell.intervals):
        x = c - interval.lower
        if x <= 0:
            return _ZERO
        if x < mass:
            product *= x / mass
    return product


def evaluate_shuffle(S: ShuffleStructure, u: PointLike) -> Fraction:
    """Sum of the cells' contributions at u.

    A MIN cell contributes min((u_1 - a^1)^+, ..., (u_d - a^d)^+, lambda); an
    INDEPENDENCE cell contributes lambda * prod_k min((u_k - a^k)^+ / lambda, 1).
    """
    if not _validated(S):
        failure = validate(S).first_failure()
        raise InvalidStructureError(f"structure fails {failure.condition.value}: {failure.witness}")
    point = as_point(u)
    if point.dim != S.dim:
        raise DimensionMismatchError(f"structure has dimension {S.dim}, point has {point.dim}")
    return _structure_value(S, point.coords)


def _structure_value(S: ShuffleStructure, coords: Coords) -> Fraction:
    total = _ZERO
    for cell in S.cells:
        total += _cell_value(cell, coords)
    return total


@dataclass(frozen=True)
class Shuffle(CopulaTerm):
    """A copula term backed by a validated shuffle structure."""

    structure: ShuffleStructure
    name: str = field(default="Shuffle", compare=False)

    def __post_init__(self):
        report = validate(self.structure)
        if not report.passed:
            failure = report.first_failure()
            raise InvalidStructureError(f"structure fails {failure.condition.value}: {failure.witness}")

    @property
    def dim(self) -> int:
        return self.structure.dim

    @property
    def label(self) -> str:
        return f"{self.name}_{self.structure.dim}"

    def value(self, coords: Coords) -> Fraction:
        return _structure_value(self.structure, coords)


def _cell(intervals: Sequence[Tuple[Fraction, Fraction]], base: BaseCopula) -> Cell:
    return Cell(tuple(Interval(a, b) for a, b in intervals), base)


def build_c_star_structure(dim: int, base: BaseCopula = BaseCopula.MIN) -> ShuffleStructure:
    """The d cells realizing C*: cell j has mass 1 - u*_j.

    J_j^k = [sum_{i not in j..k} g_i, sum_{i not in j+1..k} g_i]   for j < k,
            [sum_{i != k} g_i, 1]                                   for j = k,
            [sum_{i=k+1}^{j-1} g_i, sum_{i=k+1}^{j} g_i]            for j > k,
    with g_i = 1 - u*_i.
    """
    if dim < 2:
        raise PreconditionError(f"dimension must be at least 2, got {dim}")
    gaps = [None] + [_ONE - c for c in u_star(dim).coords]  # 1-based

    def total(indices) -> Fraction:
        return sum((gaps[i] for i in indices), _ZERO)

    everything = range(1, dim + 1)
    cells = []
    for j in everything:
        intervals = []
        for k in everything:
            if j < k:
                lower = total(i for i in everything if not j <= i <= k)
                upper = total(i for i in everything if not j + 1 <= i <= k)
            elif j == k:
                lower, upper = total(i for i in everything if i != k), _ONE
            else:
                lower = total(range(k + 1, j))
                upper = total(range(k + 1, j + 1))
            intervals.append((lower, upper))
        cells.append(_cell(intervals, base))
    logger.info("Built C* structure for d=%d with %d cells", dim, len(cells))
    return ShuffleStructure(dim, tuple(cells))


@dataclass(frozen=True)
class DeltaVector:
    """Offsets delta_1 <= ... <= delta_n of an even-dimensional manifold point.

    For d = 2n: 0 <= delta_j <= 1/(d+1) and sum(delta) = (n-1)/(d+1).
    """

    dim: int
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.dim < 2 or self.dim % 2:
            raise PreconditionError(f"delta vectors need an even dimension, got {self.dim}")
        n = self.dim // 2
        values = tuple(to_rational(v) for v in self.values)
        if n == 1 and not values:
            values = (_ZERO,)
        if len(values) != n:
            raise PreconditionError(f"d={self.dim} needs {n} offsets, got {len(values)}")
        step = Fraction(1, self.dim + 1)
        if any(not _ZERO <= v <= step for v in values):
            raise PreconditionError(f"offsets must lie in [0, {step}]: {format_vector(values)}")
        if any(a > b for a, b in zip(values, values[1:])):
            raise PreconditionError(f"offsets must be non-decreasing: {format_vector(values)}")
        if sum(values, _ZERO) != (n - 1) * step:
            raise PreconditionError(
                f"offsets must sum to {(n - 1) * step}, got {sum(values, _ZERO)}")
        object.__setattr__(self, "values", values)

    @classmethod
    def of(cls, dim: int, values: Sequence[RationalLike]) -> "DeltaVector":
        return cls(dim, tuple(values))

    @property
    def n(self) -> int:
        return self.dim // 2

    def __getitem__(self, j: int) -> Fraction:
        """1-based access, matching delta_1 ... delta_n."""
        return self.values[j - 1]

    def point(self) -> UnitPoint:
        """u(delta) = ((d-1)/(d+1) [n times], d/(d+1) + delta_1, ..., d/(d+1) + delta_n)."""
        d = self.dim
        low = Fraction(d - 1, d + 1)
        high = Fraction(d, d + 1)
        return UnitPoint((low,) * self.n + tuple(high + v for v in self.values))

    def __str__(self) -> str:
        return format_vector(self.values)


def build_manifold_structure(dim: int, delta: Union[DeltaVector, Sequence[RationalLike]],
                             base: BaseCopula = BaseCopula.MIN) -> ShuffleStructure:
    """The 3n-1 cells whose copula separates u(delta) from its reversal.

    Cell masses are 1/(d+1) + delta_i (i < n), 1/(d+1) - delta_{i-n+1}
    (n <= i <= 2n-2), 1/(d+1) - delta_{i-2n+2} (2n-1 <= i <= 3n-2) and 2/(d+1)
    for the last cell. Cells of mass 0 are left out.
    """
    if dim < 2 or dim % 2:
        raise PreconditionError(f"the manifold family needs an even dimension, got {dim}")
    if not isinstance(delta, DeltaVector):
        delta = DeltaVector.of(dim, delta)
    elif delta.dim != dim:
        raise DimensionMismatchError(f"delta vector is for d={delta.dim}, not d={dim}")

    d, n = dim, dim // 2
    c = Fraction(1, d + 1)
    dl = delta.__getitem__

    def plus(upto: int, skip: int = 0) -> Fraction:
        return sum((c + dl(j) for j in range(1, upto + 1) if j != skip), _ZERO)

    def minus(upto: int, skip: int = 0) -> Fraction:
        return sum((c - dl(j) for j in range(1, upto + 1) if j != skip), _ZERO)

    rows: List[Dict[int, Tuple[Fraction, Fraction]]] = []

    for i in range(1, n):
        row = {}
        for k in range(1, d + 1):
            if k <= n - i or k > n:
                row[k] = (plus(i - 1), plus(i))
            elif k == n - i + 1:
                row[k] = ((d - 1) * c, d * c + dl(i))
            else:
                row[k] = (plus(i - 1, skip=n + 1 - k), plus(i, skip=n + 1 - k))
        rows.append(row)

    for i in range(n, 2 * n - 1):
        m = i - n
        mass = c - dl(m + 1)
        row = {}
        for k in range(1, d + 1):
            if k == 1:
                start = (d - 2) * c - dl(n)
                row[k] = (start + minus(m), start + minus(m + 1))
            elif k <= 2 * n - i - 1:
                # upper endpoint fixed by the hypercube condition
                lower = (d - 3) * c - dl(n) - dl(n + 1 - k) + minus(m)
                row[k] = (lower, lower + mass)
            elif k == 2 * n - i:
                row[k] = (d * c + dl(n + 1 - k), _ONE)
            elif k <= n:
                start = (d - 4) * c - dl(n)
                row[k] = (start + minus(m), start + minus(m + 1))
            else:
                start = d * c - dl(n)
                row[k] = (start + minus(m), start + minus(m + 1))
        rows.append(row)

    for i in range(2 * n - 1, 3 * n - 1):
        m = i - 2 * n + 1
        row = {}
        for k in range(1, d + 1):
            if k == 1:
                row[k] = ((d - 2) * c + minus(m), (d - 2) * c + minus(m + 1))
            elif k <= n:
                row[k] = ((d - 4) * c + minus(m), (d - 4) * c + minus(m + 1))
            elif k == i - n + 2:
                row[k] = (d * c + dl(k - n), _ONE)
            else:
                row[k] = (d * c + minus(m, skip=k - n), d * c + minus(m + 1, skip=k - n))
        rows.append(row)

    last = {}
    for k in range(1, d + 1):
        if k == 1:
            last[k] = ((d - 1) * c, _ONE)
        elif k <= n:
            last[k] = ((d - 3) * c, (d - 1) * c)
        else:
            last[k] = ((d - 2) * c - dl(n), d * c - dl(n))
    rows.append(last)

    cells = [_cell([row[k] for k in range(1, d + 1)], base) for row in rows]
    cells = [cell for cell in cells if cell.mass != 0]
    logger.info("Built manifold structure for d=%d, delta=%s: %d cells", d, delta, len(cells))
    return ShuffleStructure(d, tuple(cells))


def structure_to_dict(S: ShuffleStructure) -> Dict[str, Any]:
    return {
        "dim": S.dim,
        "cells": [
            {
                "intervals": [[format_rational(iv.lower), format_rational(iv.upper)]
                              for iv in cell.intervals],
                "base": cell.base.value,
            }
            for cell in S.cells
        ],
    }


def structure_from_dict(data: Dict[str, Any]) -> ShuffleStructure:
    """Read the shuffle-spec document; masses are derived from the intervals."""
    try:
        dim = int(data["dim"])
        raw_cells = data["cells"]
    except (KeyError, TypeError, ValueError) as exc:
        raise RationalParseError(f"shuffle spec needs integer 'dim' and list 'cells': {exc}") from exc
    if not isinstance(raw_cells, list):
        raise RationalParseError(f"'cells' must be a list, got {type(raw_cells).__name__}")
    cells = []
    for index, raw in enumerate(raw_cells, start=1):
        try:
            base = BaseCopula(raw.get("base", BaseCopula.MIN.value))
            pairs = raw["intervals"]
        except (KeyError, ValueError, AttributeError) as exc:
            raise RationalParseError(f"cell {index}: {exc}") from exc
        if not isinstance(pairs, list):
            raise RationalParseError(f"cell {index}: 'intervals' must be a list, got {type(pairs).__name__}")
        intervals = []
        for pair in pairs:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise RationalParseError(f"cell {index}: intervals must be pairs, got {pair!r}")
            if not all(isinstance(x, (str, int)) and not isinstance(x, bool) for x in pair):
                raise RationalParseError(f"cell {index}: endpoints must be rational strings, got {pair!r}")
            a, b = (to_rational(str(x), strict=True) for x in pair)
            intervals.append(Interval(a, b))
        cells.append(Cell(tuple(intervals), base))
    return ShuffleStructure(dim, tuple(cells))


def dump_structure(S: ShuffleStructure, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(structure_to_dict(S), indent=2) + "\n", encoding="utf-8")


def load_structure(path: Union[str, Path]) -> ShuffleStructure:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise RationalParseError(f"{path}: not a JSON document ({exc})") from exc
    return structure_from_dict(data)
