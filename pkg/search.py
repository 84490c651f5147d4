"""Certified grid maximization of |C(u) - C(u_pi)|, the measure mu and the manifold of maximal points.

On the grid {0, h, ..., 1}^d the values of C are computed once (in chunks,
optionally on a process pool) and every permutation is then scanned by
table lookup. Since u -> C(u) - C(u_pi) is 2-Lipschitz in the sum metric
and each point lies within sum-distance d*h/2 of the grid, the true maximum
is at most best_value + d*h.
"""
from __future__ import annotations

import functools
import itertools
import logging
import math
import random
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import perm as perms
from axioms import grid_count
from copula import CopulaTerm, PointLike, UnitPoint, as_point, u_star
from errors import DimensionMismatchError, GridStepError, PreconditionError
from parallel import chunk_ranges, parallel_map
from shuffle import DeltaVector

logger = logging.getLogger("Search")

Number = Union[Fraction, float]

# 8! permutations; beyond this mu falls back to a sampled lower bound
DEFAULT_PERM_BUDGET = 40320


@dataclass
class SearchReport:
    term: str
    best_point: UnitPoint
    best_perm: perms.Perm
    best_value: Number
    grid_step: Fraction
    certified_upper: Number
    evaluations: int
    exact: bool = True
    perms_checked: int = 1
    exhaustive: bool = True

    @property
    def gap(self) -> Number:
        return self.certified_upper - self.best_value


@dataclass(frozen=True)
class ManifoldPoint:
    dim: int
    point: UnitPoint
    delta: Optional[DeltaVector] = None


def _grid_size(dim: int, step: Fraction) -> int:
    m = grid_count(step)
    if m % (dim + 1):
        raise GridStepError(f"grid step 1/{m} must have (d+1) = {dim + 1} dividing {m}")
    return m


def _table_chunk(C: CopulaTerm, dim: int, m: int, exact: bool, span: Tuple[int, int]) -> List[Number]:
    values = []
    base = m + 1
    for index in range(span[0], span[1]):
        digits = [0] * dim
        for k in range(dim - 1, -1, -1):
            index, digits[k] = divmod(index, base)
        if exact:
            coords = tuple(Fraction(t, m) for t in digits)
        else:
            coords = tuple(t / m for t in digits)
        values.append(C.value(coords))
    return values


class GridSearch:
    """Grid maximizer keeping the value tables of recently searched terms."""

    def __init__(self, max_tables: int = 4):
        self.max_tables = max_tables
        self._tables: "OrderedDict[tuple, List[Number]]" = OrderedDict()

    def table(self, C: CopulaTerm, m: int, exact: bool = True,
              workers: Optional[int] = None) -> List[Number]:
        """Values of C at every grid point, flat and in lexicographic order."""
        try:
            key = (C, m, exact)
            hash(key)
        except TypeError:
            key = None
        if key is not None and key in self._tables:
            self._tables.move_to_end(key)
            return self._tables[key]
        total = (m + 1) ** C.dim
        logger.info("Evaluating %s on %d grid points (step 1/%d)", C.label, total, m)
        build = functools.partial(_table_chunk, C, C.dim, m, exact)
        values: List[Number] = []
        for chunk in parallel_map(build, chunk_ranges(total), workers):
            values.extend(chunk)
        if key is not None:
            self._tables[key] = values
            while len(self._tables) > self.max_tables:
                self._tables.popitem(last=False)
        return values

    @staticmethod
    def _scan(table: Sequence[Number], dim: int, m: int, pi: perms.Perm) -> Tuple[Number, Tuple[int, ...]]:
        """Largest |T(t) - T(t_pi)|; the lexicographically smallest grid index wins ties."""
        weights = [(m + 1) ** (dim - 1 - k) for k in range(dim)]
        source = [0] * dim
        for k, image in enumerate(pi.images):
            source[image - 1] = weights[k]
        best, best_digits = None, None
        for index, digits in enumerate(itertools.product(range(m + 1), repeat=dim)):
            moved = 0
            for t, w in zip(digits, source):
                moved += t * w
            diff = abs(table[index] - table[moved])
            if best is None or diff > best:
                best, best_digits = diff, digits
        return best, best_digits

    def max_difference(self, C: CopulaTerm, pi: perms.Perm, step: Fraction, *,
                       exact: bool = True, workers: Optional[int] = None) -> SearchReport:
        if pi.dim != C.dim:
            raise DimensionMismatchError(f"permutation of dimension {pi.dim} for {C.label}")
        step = Fraction(step)
        m = _grid_size(C.dim, step)
        if not exact:
            logger.warning("Float-mode search for %s: values are not certified", C.label)
        table = self.table(C, m, exact, workers)
        best, digits = self._scan(table, C.dim, m, pi)
        return self._report(C, pi, best, digits, m, step, exact, len(table))

    def _report(self, C, pi, best, digits, m, step, exact, evaluations, **extra) -> SearchReport:
        slack = C.dim * step if exact else C.dim * float(step)
        return SearchReport(
            term=C.label,
            best_point=UnitPoint(tuple(Fraction(t, m) for t in digits)),
            best_perm=pi,
            best_value=best,
            grid_step=step,
            certified_upper=best + slack,
            evaluations=evaluations,
            exact=exact,
            **extra,
        )

    def mu(self, C: CopulaTerm, step: Fraction, perm_budget: int = DEFAULT_PERM_BUDGET, *,
           seed: int = 0, workers: Optional[int] = None) -> Tuple[Fraction, SearchReport]:
        """mu(C) = (d+1)/(d-1) times the largest grid difference over permutations.

        Only one of each pair {pi, pi^-1} is scanned. When d! exceeds the
        budget, the reverse and `perm_budget` random permutations are used and
        the report is marked non-exhaustive (a lower bound).
        """
        d = C.dim
        step = Fraction(step)
        m = _grid_size(d, step)
        exhaustive = math.factorial(d) <= perm_budget
        if exhaustive:
            candidates = [pi for pi in perms.all_perms(d)
                          if not pi.is_identity() and pi.images <= perms.inverse(pi).images]
        else:
            logger.warning("d! = %d exceeds budget %d: mu is only a lower bound",
                            math.factorial(d), perm_budget)
            rng = random.Random(seed)
            candidates = [perms.reverse(d)]
            for _ in range(perm_budget):
                images = list(range(1, d + 1))
                rng.shuffle(images)
                candidates.append(perms.Perm(tuple(images)))
            candidates = sorted(set(candidates), key=lambda p: p.images)
        if not candidates:
            candidates = [perms.identity(d)]

        table = self.table(C, m, True, workers)
        best_key, best_perm, best_digits = None, None, None
        for pi in candidates:
            value, digits = self._scan(table, d, m, pi)
            key = (-value, digits, pi.images)
            if best_key is None or key < best_key:
                best_key, best_perm, best_digits = key, pi, digits
        report = self._report(C, best_perm, -best_key[0], best_digits, m, step, True, len(table),
                              perms_checked=len(candidates), exhaustive=exhaustive)
        value = Fraction(d + 1, d - 1) * report.best_value
        logger.info("mu(%s) = %s over %d permutations", C.label, value, len(candidates))
        return value, report

    def attaining_points(self, C: CopulaTerm, pi: perms.Perm, step: Fraction, target: Fraction,
                         workers: Optional[int] = None) -> List[UnitPoint]:
        """Grid points where |C(u) - C(u_pi)| equals `target`, in lexicographic order."""
        if pi.dim != C.dim:
            raise DimensionMismatchError(f"permutation of dimension {pi.dim} for {C.label}")
        m = _grid_size(C.dim, Fraction(step))
        table = self.table(C, m, True, workers)
        weights = [(m + 1) ** (C.dim - 1 - k) for k in range(C.dim)]
        points = []
        for index, digits in enumerate(itertools.product(range(m + 1), repeat=C.dim)):
            moved = sum(digits[image - 1] * weights[k] for k, image in enumerate(pi.images))
            if abs(table[index] - table[moved]) == target:
                points.append(UnitPoint(tuple(Fraction(t, m) for t in digits)))
        return points


_grid_search: Optional[GridSearch] = None


def get_grid_search() -> GridSearch:
    global _grid_search
    if _grid_search is None:
        _grid_search = GridSearch()
    return _grid_search


def max_difference(C: CopulaTerm, pi: perms.Perm, step: Fraction, *, exact: bool = True,
                   workers: Optional[int] = None) -> SearchReport:
    return get_grid_search().max_difference(C, pi, step, exact=exact, workers=workers)


def mu(C: CopulaTerm, step: Fraction, perm_budget: int = DEFAULT_PERM_BUDGET, *, seed: int = 0,
       workers: Optional[int] = None) -> Tuple[Fraction, SearchReport]:
    return get_grid_search().mu(C, step, perm_budget, seed=seed, workers=workers)


def attaining_points(C: CopulaTerm, pi: perms.Perm, step: Fraction, target: Fraction,
                     workers: Optional[int] = None) -> List[UnitPoint]:
    return get_grid_search().attaining_points(C, pi, step, target, workers)


def maximizing_perms(C: CopulaTerm, u: PointLike) -> Tuple[Fraction, List[perms.Perm]]:
    """max_pi |C(u) - C(u_pi)| at a fixed point and every permutation reaching it."""
    point = as_point(u)
    if point.dim != C.dim:
        raise DimensionMismatchError(f"{C.label} has dimension {C.dim}, point has {point.dim}")
    base = C.value(point.coords)
    diffs: Dict[perms.Perm, Fraction] = {
        pi: abs(base - C.value(perms.apply(pi, point.coords))) for pi in perms.all_perms(C.dim)
    }
    best = max(diffs.values())
    return best, [pi for pi, diff in diffs.items() if diff == best]


def is_in_manifold(u: PointLike) -> Tuple[bool, Optional[DeltaVector]]:
    """Whether sort(u) is a maximal point; for even d the offsets are returned too."""
    point = as_point(u).sorted()
    d = point.dim
    if d % 2:
        return point == u_star(d), None
    n = d // 2
    low, high = Fraction(d - 1, d + 1), Fraction(d, d + 1)
    if any(c != low for c in point.coords[:n]):
        return False, None
    try:
        delta = DeltaVector.of(d, [c - high for c in point.coords[n:]])
    except PreconditionError:
        return False, None
    return True, delta


# offsets are drawn on the grid 1/(20(d+1))
SAMPLE_RESOLUTION = 20


def sample_manifold(dim: int, count: int, seed: int = 0) -> List[ManifoldPoint]:
    """`count` points of the manifold (the single u* when d is odd or d = 2).

    For d = 2n, n-1 offsets are drawn uniformly, the last one is solved from
    the sum constraint, out-of-range draws are rejected and the result sorted.
    """
    if dim < 2:
        raise PreconditionError(f"dimension must be at least 2, got {dim}")
    if dim % 2:
        return [ManifoldPoint(dim, u_star(dim))]
    if dim == 2:
        delta = DeltaVector.of(2, [0])
        return [ManifoldPoint(2, delta.point(), delta)]

    n = dim // 2
    den = SAMPLE_RESOLUTION * (dim + 1)
    target = (n - 1) * SAMPLE_RESOLUTION
    rng = random.Random(seed)
    points, rejected = [], 0
    while len(points) < count:
        free = [rng.randint(0, SAMPLE_RESOLUTION) for _ in range(n - 1)]
        last = target - sum(free)
        if not 0 <= last <= SAMPLE_RESOLUTION:
            rejected += 1
            continue
        delta = DeltaVector.of(dim, [Fraction(v, den) for v in sorted(free + [last])])
        points.append(ManifoldPoint(dim, delta.point(), delta))
    if rejected > 10 * count:
        logger.warning("Manifold sampling for d=%d rejected %d draws", dim, rejected)
    return points
