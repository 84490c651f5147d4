"""Pointwise upper bounds on |C(u) - C(u_pi)| valid for every d-copula C."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

import perm as perms
from copula import PointLike, as_point
from errors import DimensionMismatchError

_ZERO = Fraction(0)
_ONE = Fraction(1)


def theorem_bound(dim: int) -> Fraction:
    """(d-1)/(d+1), the best possible bound over all copulas, points and permutations."""
    return Fraction(dim - 1, dim + 1)


def frechet_pair_bound(dim: int) -> Fraction:
    """(d-1)/d = sup_u M_d(u) - W_d(u), reached at u_j = (d-1)/d."""
    return Fraction(dim - 1, dim)


def transposition_bound(u: PointLike, t: perms.Transposition) -> Fraction:
    """|u_i - u_j| for the swap of axes i and j."""
    point = as_point(u)
    if t.j > point.dim:
        raise DimensionMismatchError(f"transposition {t} does not act on dimension {point.dim}")
    return abs(point[t.i - 1] - point[t.j - 1])


def corollary_min_bound(u: PointLike) -> Fraction:
    """min{u_1, ..., u_d, sum_i (u_i - u_(1)), (d-1) + u_(1) - sum_i u_i}."""
    point = as_point(u)
    smallest = min(point.coords)
    total = sum(point.coords, _ZERO)
    spread = total - point.dim * smallest
    return min(smallest, spread, point.dim - 1 + smallest - total)


def _upper_half_spread(values) -> Fraction:
    ordered = sorted(values)
    if not ordered:
        return _ZERO
    first = ordered[0]
    start = math.ceil(len(ordered) / 2)  # 0-based index of the (ceil(p/2)+1)-th value
    return sum((v - first for v in ordered[start:]), _ZERO)


def improved_half_bound(u: PointLike, pi: Optional[perms.Perm] = None) -> Fraction:
    """sum_{i=ceil(d/2)+1}^{d} (v_i - v_1) over the sorted coordinates v.

    With a permutation, the same sum taken over the p coordinates pi moves
    is also a bound; the smaller of the two is returned.
    """
    point = as_point(u)
    bound = _upper_half_spread(point.coords)
    if pi is not None:
        if pi.dim != point.dim:
            raise DimensionMismatchError(f"permutation of dimension {pi.dim} for a point of dimension {point.dim}")
        moved = [point[k - 1] for k in perms.nonfixed_indices(pi)]
        bound = min(bound, _upper_half_spread(moved))
    return bound


def frechet_gap(u: PointLike) -> Fraction:
    """M_d(u) - W_d(u)."""
    point = as_point(u)
    lower = max(sum(point.coords, _ZERO) - point.dim + 1, _ZERO)
    return min(point.coords) - lower


@dataclass(frozen=True)
class BoundReport:
    corollary_min_bound: Fraction
    improved_half_bound: Fraction
    frechet_gap: Fraction
    theorem_bound: Fraction
    transposition_bound: Optional[Fraction] = None

    @property
    def combined(self) -> Fraction:
        return min(self.entries().values())

    def entries(self) -> Dict[str, Fraction]:
        """Populated bounds in report order."""
        values = {}
        if self.transposition_bound is not None:
            values["transposition_bound"] = self.transposition_bound
        values["corollary_min_bound"] = self.corollary_min_bound
        values["improved_half_bound"] = self.improved_half_bound
        values["frechet_gap"] = self.frechet_gap
        values["theorem_bound"] = self.theorem_bound
        return values


def pointwise_bound(u: PointLike, pi: Optional[perms.Perm] = None) -> BoundReport:
    """Every applicable bound at u; `combined` never claims attainment.

    Without a permutation the report bounds max_pi |C(u) - C(u_pi)|.
    """
    point = as_point(u)
    transposition = None
    if pi is not None:
        if pi.dim != point.dim:
            raise DimensionMismatchError(f"permutation of dimension {pi.dim} for a point of dimension {point.dim}")
        if perms.is_transposition(pi):
            i, j = perms.nonfixed_indices(pi)
            transposition = transposition_bound(point, perms.Transposition(i, j))
    return BoundReport(
        corollary_min_bound=corollary_min_bound(point),
        # the sum can exceed 1 for d >= 4; any copula difference is at most 1
        improved_half_bound=min(improved_half_bound(point, pi), _ONE),
        frechet_gap=frechet_gap(point),
        theorem_bound=theorem_bound(point.dim),
        transposition_bound=transposition,
    )
