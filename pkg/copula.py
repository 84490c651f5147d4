"""Algebraic copula terms with exact rational evaluation.

A `CopulaTerm` is an immutable description of a d-variate cdf-like function:
the Frechet-Hoeffding bounds, the independence copula, the closed form of the
extremal non-exchangeable copula C*, permuted views and margins (shuffle
structures live in `shuffle.py`). Terms evaluate points of [0,1]^d to exact
Fractions, so attainment of bounds is checked as an equality.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Tuple, Union

import perm as perms
from errors import DimensionMismatchError, PreconditionError
from rationals import RationalLike, format_vector, parse_vector, to_rational


Coords = Tuple[Fraction, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class UnitPoint:
    """A point of [0,1]^d with exact rational coordinates."""

    coords: Coords

    def __post_init__(self):
        coords = tuple(to_rational(c) for c in self.coords)
        if len(coords) < 2:
            raise PreconditionError(f"points need d >= 2, got d={len(coords)}")
        for k, c in enumerate(coords, start=1):
            if not _ZERO <= c <= _ONE:
                raise PreconditionError(f"coordinate {k} = {c} is outside [0, 1]")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords: RationalLike) -> "UnitPoint":
        return cls(tuple(coords))

    @classmethod
    def parse(cls, text: str) -> "UnitPoint":
        return cls(parse_vector(text))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, index):
        return self.coords[index]

    def sorted(self) -> "UnitPoint":
        return UnitPoint(tuple(sorted(self.coords)))

    def __str__(self) -> str:
        return format_vector(self.coords)


PointLike = Union[UnitPoint, Sequence[RationalLike]]


def as_point(u: PointLike) -> UnitPoint:
    return u if isinstance(u, UnitPoint) else UnitPoint(tuple(u))


@dataclass(frozen=True)
class HyperBox:
    """The box [a_1, b_1] x ... x [a_d, b_d] with rational endpoints in [0,1]."""

    lower: Coords
    upper: Coords

    def __post_init__(self):
        lower = tuple(to_rational(a) for a in self.lower)
        upper = tuple(to_rational(b) for b in self.upper)
        if len(lower) != len(upper):
            raise DimensionMismatchError("box endpoints have different dimensions")
        for k, (a, b) in enumerate(zip(lower, upper), start=1):
            if not _ZERO <= a <= b <= _ONE:
                raise PreconditionError(f"axis {k}: [{a}, {b}] is not an interval in [0, 1]")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, a: RationalLike, b: RationalLike, dim: int) -> "HyperBox":
        return cls((a,) * dim, (b,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def corners(self) -> Iterator[Tuple[int, Coords]]:
        """Yield (sign, corner) pairs; the sign is (-1)^(number of lower endpoints)."""
        for choice in itertools.product((False, True), repeat=self.dim):
            corner = tuple(a if low else b for low, a, b in zip(choice, self.lower, self.upper))
            yield (-1 if sum(choice) % 2 else 1), corner

    def split(self, axis: int, at: RationalLike) -> Tuple["HyperBox", "HyperBox"]:
        """Cut the box by the hyperplane u_axis = at (axis is 1-based)."""
        at = to_rational(at)
        k = axis - 1
        if not self.lower[k] <= at <= self.upper[k]:
            raise PreconditionError(f"{at} is outside the box along axis {axis}")
        left_upper = self.upper[:k] + (at,) + self.upper[k + 1:]
        right_lower = self.lower[:k] + (at,) + self.lower[k + 1:]
        return HyperBox(self.lower, left_upper), HyperBox(right_lower, self.upper)

    def __str__(self) -> str:
        return " x ".join(f"[{a}, {b}]" for a, b in zip(self.lower, self.upper))


class CopulaTerm:
    """Base class for every evaluatable term.

    Subclasses implement `value`, which receives already-validated exact
    coordinates; `evaluate` is the public, checked entry point.
    """

    dim: int

    @property
    def is_copula(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return type(self).__name__

    def value(self, coords: Coords) -> Fraction:
        raise NotImplementedError


def _positive(x: Fraction) -> Fraction:
    return x if x > 0 else _ZERO


@dataclass(frozen=True)
class FrechetUpper(CopulaTerm):
    """M_d(u) = min(u_1, ..., u_d)."""

    dim: int

    @property
    def label(self) -> str:
        return f"M_{self.dim}"

    def value(self, coords: Coords) -> Fraction:
        return min(coords)


@dataclass(frozen=True)
class FrechetLowerFn(CopulaTerm):
    """W_d(u) = max(sum(u) - d + 1, 0); a copula only for d = 2."""

    dim: int

    @property
    def is_copula(self) -> bool:
        return self.dim == 2

    @property
    def label(self) -> str:
        return f"W_{self.dim}"

    def value(self, coords: Coords) -> Fraction:
        return _positive(sum(coords) - self.dim + 1)


@dataclass(frozen=True)
class Independence(CopulaTerm):
    """Pi_d(u) = u_1 * ... * u_d."""

    dim: int

    @property
    def label(self) -> str:
        return f"Pi_{self.dim}"

    def value(self, coords: Coords) -> Fraction:
        result = _ONE
        for c in coords:
            result *= c
        return result


@dataclass(frozen=True)
class CStarClosedForm(CopulaTerm):
    """The extremal copula C* written with modular index sets.

    C*(u) = sum_j min_k ( u_{((j+k) mod d)+1} - sum_{i not in I(j,k)} (1 - u*_i) )^+
    with I(j,k) = {((j+l) mod d)+1 : l = 0..k}. `terms[j]` holds the
    (axis, shift) pairs of the j-th summand, 0-based axes.
    """

    dim: int
    terms: Tuple[Tuple[Tuple[int, Fraction], ...], ...] = field(repr=False, default=())

    @property
    def label(self) -> str:
        return f"C*_{self.dim}"

    def value(self, coords: Coords) -> Fraction:
        total = _ZERO
        for summand in self.terms:
            smallest = None
            for axis, shift in summand:
                x = coords[axis] - shift
                if x <= 0:
                    smallest = _ZERO
                    break
                if smallest is None or x < smallest:
                    smallest = x
            total += smallest
        return total


@dataclass(frozen=True)
class NelsenExtremal(CopulaTerm):
    """The bivariate extremal copula min{u1, u2, (u1-1/3)^+ + (u2-2/3)^+}."""

    dim: int = 2

    @property
    def label(self) -> str:
        return "Nelsen_2"

    def value(self, coords: Coords) -> Fraction:
        u1, u2 = coords
        return min(u1, u2, _positive(u1 - Fraction(1, 3)) + _positive(u2 - Fraction(2, 3)))


@dataclass(frozen=True)
class PermutedView(CopulaTerm):
    """u -> C(u_pi): the inner term seen through a relabeling of its axes."""

    inner: CopulaTerm
    pi: perms.Perm

    def __post_init__(self):
        if self.inner.dim != self.pi.dim:
            raise DimensionMismatchError(
                f"permutation of dimension {self.pi.dim} cannot wrap {self.inner.label}")

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def is_copula(self) -> bool:
        return self.inner.is_copula

    @property
    def label(self) -> str:
        return f"{self.inner.label}[{self.pi}]"

    def value(self, coords: Coords) -> Fraction:
        return self.inner.value(perms.apply(self.pi, coords))


@dataclass(frozen=True)
class Margin(CopulaTerm):
    """The margin of `inner` on `kept_axes`: dropped axes are pinned to 1."""

    inner: CopulaTerm
    kept_axes: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.kept_axes)

    @property
    def is_copula(self) -> bool:
        return self.inner.is_copula

    @property
    def label(self) -> str:
        return f"{self.inner.label}|{','.join(str(k) for k in self.kept_axes)}"

    def value(self, coords: Coords) -> Fraction:
        full = [_ONE] * self.inner.dim
        for axis, c in zip(self.kept_axes, coords):
            full[axis - 1] = c
        return self.inner.value(tuple(full))


def _check_dim(C: CopulaTerm, d: int) -> None:
    if C.dim != d:
        raise DimensionMismatchError(f"{C.label} has dimension {C.dim}, point has dimension {d}")


def evaluate(C: CopulaTerm, u: PointLike) -> Fraction:
    """Exact value C(u)."""
    point = as_point(u)
    _check_dim(C, point.dim)
    return C.value(point.coords)


def frechet_upper(dim: int) -> FrechetUpper:
    _require_dim(dim)
    return FrechetUpper(dim)


def frechet_lower(dim: int) -> FrechetLowerFn:
    _require_dim(dim)
    return FrechetLowerFn(dim)


def independence(dim: int) -> Independence:
    _require_dim(dim)
    return Independence(dim)


def nelsen_extremal() -> NelsenExtremal:
    return NelsenExtremal()


def _require_dim(dim: int) -> None:
    if dim < 2:
        raise PreconditionError(f"dimension must be at least 2, got {dim}")


def u_star(dim: int) -> UnitPoint:
    """The point where C* separates from its reversal by (d-1)/(d+1).

    Components are (d-1)/(d+1) for j <= (d+1)/2, d/(d+1) at j = d/2 + 1 when
    d is even, and 1 otherwise; they always sum to d - 1.
    """
    _require_dim(dim)
    coords = []
    for j in range(1, dim + 1):
        if 2 * j <= dim + 1:
            coords.append(Fraction(dim - 1, dim + 1))
        elif dim % 2 == 0 and j == dim // 2 + 1:
            coords.append(Fraction(dim, dim + 1))
        else:
            coords.append(_ONE)
    return UnitPoint(tuple(coords))


def c_star_closed_form(dim: int) -> CStarClosedForm:
    _require_dim(dim)
    gaps = [_ONE - c for c in u_star(dim).coords]
    terms = []
    for j in range(dim):
        summand = []
        for k in range(dim):
            index_set = {(j + l) % dim for l in range(k + 1)}
            shift = sum((gaps[i] for i in range(dim) if i not in index_set), _ZERO)
            summand.append(((j + k) % dim, shift))
        terms.append(tuple(summand))
    return CStarClosedForm(dim, tuple(terms))


def margin(C: CopulaTerm, kept_axes: Sequence[int]) -> Margin:
    """The |kept_axes|-dimensional margin, kept axes in the caller's order."""
    kept = tuple(int(k) for k in kept_axes)
    if len(kept) < 2:
        raise PreconditionError("margins need at least two kept axes")
    if len(set(kept)) != len(kept) or not all(1 <= k <= C.dim for k in kept):
        raise PreconditionError(f"invalid kept axes {kept} for dimension {C.dim}")
    return Margin(C, kept)


def box_volume(C: CopulaTerm, box: HyperBox) -> Fraction:
    """The C-volume of `box` by inclusion-exclusion over its 2^d corners."""
    _check_dim(C, box.dim)
    return sum((sign * C.value(corner) for sign, corner in box.corners()), _ZERO)
