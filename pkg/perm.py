"""Permutations of {1, ..., d} acting on points by coordinate relabeling.

Convention used everywhere: ``apply(pi, u)[k] == u[pi(k)]`` (1-based), so the
k-th coordinate of the permuted point is the pi(k)-th coordinate of the input.
Composition is defined through this point action, see `compose`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple, TypeVar

from errors import DimensionMismatchError, PreconditionError, RationalParseError

T = TypeVar("T")


@dataclass(frozen=True)
class Perm:
    """A permutation stored in one-line notation: ``images[k-1] == pi(k)``."""

    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        object.__setattr__(self, "images", images)
        if len(images) < 2:
            raise PreconditionError(f"permutations need d >= 2, got d={len(images)}")
        if sorted(images) != list(range(1, len(images) + 1)):
            raise PreconditionError(f"{images} is not a bijection of 1..{len(images)}")

    @property
    def dim(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def is_identity(self) -> bool:
        return all(image == k for k, image in enumerate(self.images, start=1))

    def __str__(self) -> str:
        return ",".join(str(i) for i in self.images)

    @classmethod
    def parse(cls, text: str, dim: int) -> "Perm":
        """Read the CLI syntax: ``id``, ``reverse`` or comma-separated images."""
        token = text.strip().lower()
        if token == "id":
            return identity(dim)
        if token == "reverse":
            return reverse(dim)
        try:
            images = tuple(int(part) for part in token.split(","))
        except ValueError as exc:
            raise RationalParseError(f"malformed permutation: {text!r}") from exc
        if len(images) != dim:
            raise DimensionMismatchError(f"permutation {text!r} has {len(images)} entries, expected {dim}")
        return cls(images)


@dataclass(frozen=True)
class Transposition:
    """The swap of axes i and j, stored with i < j."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise PreconditionError("a transposition needs two distinct axes")
        if self.i > self.j:
            first, second = self.j, self.i
            object.__setattr__(self, "i", first)
            object.__setattr__(self, "j", second)
        if self.i < 1:
            raise PreconditionError(f"axis indices are 1-based, got {self.i}")

    def to_perm(self, dim: int) -> Perm:
        return transposition(dim, self.i, self.j)

    def __str__(self) -> str:
        return f"({self.i} {self.j})"


def identity(dim: int) -> Perm:
    return Perm(tuple(range(1, dim + 1)))


def reverse(dim: int) -> Perm:
    """The order reversing permutation pi(k) = d - k + 1."""
    return Perm(tuple(range(dim, 0, -1)))


def transposition(dim: int, i: int, j: int) -> Perm:
    if not (1 <= i <= dim and 1 <= j <= dim) or i == j:
        raise PreconditionError(f"invalid transposition ({i} {j}) for d={dim}")
    images = list(range(1, dim + 1))
    images[i - 1], images[j - 1] = j, i
    return Perm(tuple(images))


def cycle(dim: int, indices: Sequence[int]) -> Perm:
    """The cycle sending indices[0] -> indices[1] -> ... -> indices[0]."""
    images = list(range(1, dim + 1))
    for position, index in enumerate(indices):
        images[index - 1] = indices[(position + 1) % len(indices)]
    return Perm(tuple(images))


def _check_dim(dim: int, other: int, what: str) -> None:
    if dim != other:
        raise DimensionMismatchError(f"{what}: dimension {dim} does not match {other}")


def apply(pi: Perm, u: Sequence[T]) -> Sequence[T]:
    """Return u_pi, i.e. the point v with v_k = u_{pi(k)}.

    The result has the same type as `u` (UnitPoint, tuple, list).
    """
    coords = tuple(u)
    _check_dim(pi.dim, len(coords), "apply")
    return type(u)(tuple(coords[image - 1] for image in pi.images))


def compose(sigma: Perm, tau: Perm) -> Perm:
    """The permutation acting as `sigma` first and `tau` second.

    ``apply(compose(sigma, tau), u) == apply(tau, apply(sigma, u))``.
    """
    _check_dim(sigma.dim, tau.dim, "compose")
    return Perm(tuple(sigma(tau(k)) for k in range(1, sigma.dim + 1)))


def inverse(pi: Perm) -> Perm:
    images = [0] * pi.dim
    for k, image in enumerate(pi.images, start=1):
        images[image - 1] = k
    return Perm(tuple(images))


def decompose(pi: Perm) -> List[Transposition]:
    """Split `pi` into at most d-1 transpositions.

    Positions are settled right to left: first the d-th coordinate receives
    u_{pi(d)}, then the (d-1)-th, down to the second; the first is then right
    automatically. Replaying the result in order through `apply` reproduces
    `pi`; swaps that would be the identity are left out.
    """
    current = list(range(1, pi.dim + 1))  # current[k-1]: index of u sitting at position k
    steps: List[Transposition] = []
    for k in range(pi.dim, 1, -1):
        wanted = pi(k)
        position = current.index(wanted) + 1
        if position != k:
            steps.append(Transposition(position, k))
            current[position - 1], current[k - 1] = current[k - 1], current[position - 1]
    return steps


def replay(steps: Sequence[Transposition], dim: int) -> Perm:
    """Compose transpositions in point-action order (first step acts first)."""
    result = identity(dim)
    for step in steps:
        result = compose(result, step.to_perm(dim))
    return result


def nonfixed_indices(pi: Perm) -> Tuple[int, ...]:
    """Sorted indices i with pi(i) != i; their count is never 1."""
    return tuple(k for k, image in enumerate(pi.images, start=1) if image != k)


def is_transposition(pi: Perm) -> bool:
    return len(nonfixed_indices(pi)) == 2


def all_perms(dim: int) -> Iterator[Perm]:
    """Every permutation of S_d in lexicographic order of images."""
    for images in itertools.permutations(range(1, dim + 1)):
        yield Perm(images)
