"""Exact sampling checks of the copula axioms and the margin audit.

Random coordinates are drawn from dyadic and (d+1)-adic rationals so that
the cell boundaries of shuffle structures are hit with positive probability.
A pass means no counterexample was found in the sample; a failure always
carries a concrete witness.
"""
from __future__ import annotations

import functools
import itertools
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from bounds import theorem_bound
from copula import Coords, CopulaTerm, HyperBox, UnitPoint, box_volume, margin
from errors import GridStepError, PreconditionError
from parallel import chunk_ranges, parallel_map

logger = logging.getLogger("Axioms")

_ZERO = Fraction(0)
_ONE = Fraction(1)

# boxes are enumerated over the (d+1)-adic lattice only up to this dimension
DIRECTED_MAX_DIM = 4


class CheckStatus(Enum):
    PASSED = "pass"
    FAILED = "fail"


@dataclass
class CheckResult:
    name: str
    status: CheckStatus
    checked: int
    witness: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASSED


@dataclass
class AxiomReport:
    term: str
    seed: int
    expected_copula: bool
    grounded: CheckResult
    uniform_margins: CheckResult
    d_increasing: CheckResult
    lipschitz: CheckResult
    points_checked: int = 0
    boxes_checked: int = 0

    def checks(self) -> List[CheckResult]:
        return [self.grounded, self.uniform_margins, self.d_increasing, self.lipschitz]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks())

    def first_failure(self) -> Optional[CheckResult]:
        return next((check for check in self.checks() if not check.passed), None)


def denominators(dim: int) -> Tuple[int, ...]:
    dyadic = (2, 4, 8, 16, 32, 64)
    adic = tuple((dim + 1) * m for m in (1, 2, 4, 20))
    return dyadic + adic


def random_rational(rng: random.Random, dim: int) -> Fraction:
    den = rng.choice(denominators(dim))
    return Fraction(rng.randint(0, den), den)


def random_point(rng: random.Random, dim: int) -> Coords:
    return tuple(random_rational(rng, dim) for _ in range(dim))


def random_box(rng: random.Random, dim: int) -> HyperBox:
    lower, upper = [], []
    for _ in range(dim):
        a, b = sorted((random_rational(rng, dim), random_rational(rng, dim)))
        lower.append(a)
        upper.append(b)
    return HyperBox(tuple(lower), tuple(upper))


def _passed(name: str, checked: int) -> CheckResult:
    return CheckResult(name, CheckStatus.PASSED, checked)


def _failed(name: str, checked: int, witness: Dict[str, Any]) -> CheckResult:
    logger.info("%s failed after %d samples: %s", name, checked, witness)
    return CheckResult(name, CheckStatus.FAILED, checked, witness)


def check_grounded(C: CopulaTerm, samples: int, seed: int) -> CheckResult:
    """C(u) = 0 whenever some coordinate of u is 0."""
    rng = random.Random(seed)
    for index in range(samples):
        coords = list(random_point(rng, C.dim))
        coords[rng.randrange(C.dim)] = _ZERO
        value = C.value(tuple(coords))
        if value != 0:
            return _failed("grounded", index + 1, {"point": UnitPoint(tuple(coords)), "value": value})
    return _passed("grounded", samples)


def check_uniform_margins(C: CopulaTerm, samples: int, seed: int) -> CheckResult:
    """C(1, ..., 1, t, 1, ..., 1) = t on every axis."""
    rng = random.Random(seed)
    for index in range(samples):
        axis = rng.randrange(C.dim)
        t = random_rational(rng, C.dim)
        coords = [_ONE] * C.dim
        coords[axis] = t
        value = C.value(tuple(coords))
        if value != t:
            return _failed("uniform_margins", index + 1, {"axis": axis + 1, "t": t, "value": value})
    return _passed("uniform_margins", samples)


def _lattice_witness(C: CopulaTerm) -> Tuple[int, Optional[Dict[str, Any]]]:
    """Most negative box with corners on {0, 1/(d+1), ..., 1}; ties go to the first enumerated."""
    d = C.dim
    nodes = [Fraction(i, d + 1) for i in range(d + 2)]
    cache: Dict[Tuple[int, ...], Fraction] = {}

    def at(index: Tuple[int, ...]) -> Fraction:
        if index not in cache:
            cache[index] = C.value(tuple(nodes[i] for i in index))
        return cache[index]

    pairs = list(itertools.combinations(range(d + 2), 2))
    signs = list(itertools.product((False, True), repeat=d))
    worst, worst_box, count = _ZERO, None, 0
    for choice in itertools.product(pairs, repeat=d):
        count += 1
        volume = _ZERO
        for lows in signs:
            corner = tuple(a if low else b for low, (a, b) in zip(lows, choice))
            term = at(corner)
            volume += -term if sum(lows) % 2 else term
        if volume < worst:
            worst, worst_box = volume, choice
    if worst_box is None:
        return count, None
    box = HyperBox(tuple(nodes[a] for a, _ in worst_box), tuple(nodes[b] for _, b in worst_box))
    return count, {"box": box, "volume": worst, "pass": "lattice"}


def _first_negative(C: CopulaTerm, boxes: Sequence[HyperBox], span: Tuple[int, int]) -> Optional[int]:
    start, stop = span
    for index in range(start, stop):
        if box_volume(C, boxes[index]) < 0:
            return index
    return None


def check_d_increasing(C: CopulaTerm, boxes: int, seed: int, *, directed: bool = True,
                       workers: Optional[int] = None) -> CheckResult:
    """Every sampled box has non-negative C-volume.

    For d <= 4 all boxes with corners on the (d+1)-adic lattice are checked
    first and the most negative one is reported; otherwise the first
    failing random box is.
    """
    checked = 0
    if directed and C.dim <= DIRECTED_MAX_DIM:
        checked, witness = _lattice_witness(C)
        if witness is not None:
            return _failed("d_increasing", checked, witness)

    rng = random.Random(seed)
    sample = [random_box(rng, C.dim) for _ in range(boxes)]
    scan = functools.partial(_first_negative, C, sample)
    for hit in parallel_map(scan, chunk_ranges(len(sample), 1024), workers):
        if hit is not None:
            box = sample[hit]
            return _failed("d_increasing", checked + hit + 1,
                           {"box": box, "volume": box_volume(C, box), "pass": "random"})
    return _passed("d_increasing", checked + boxes)


def check_lipschitz(C: CopulaTerm, pairs: int, seed: int) -> CheckResult:
    """|C(u) - C(v)| <= sum_k |u_k - v_k| on random pairs."""
    rng = random.Random(seed)
    for index in range(pairs):
        u, v = random_point(rng, C.dim), random_point(rng, C.dim)
        change = abs(C.value(u) - C.value(v))
        distance = sum((abs(a - b) for a, b in zip(u, v)), _ZERO)
        if change > distance:
            return _failed("lipschitz", index + 1, {"u": UnitPoint(u), "v": UnitPoint(v),
                                                   "change": change, "distance": distance})
    return _passed("lipschitz", pairs)


def verify(C: CopulaTerm, samples: int = 1000, boxes: int = 1000, seed: int = 0,
           workers: Optional[int] = None) -> AxiomReport:
    """Run all four checks; each uses its own stream derived from `seed`."""
    report = AxiomReport(
        term=C.label,
        seed=seed,
        expected_copula=C.is_copula,
        grounded=check_grounded(C, samples, seed),
        uniform_margins=check_uniform_margins(C, samples, seed + 1),
        d_increasing=check_d_increasing(C, boxes, seed + 2, workers=workers),
        lipschitz=check_lipschitz(C, samples, seed + 3),
    )
    report.points_checked = report.grounded.checked + report.uniform_margins.checked + report.lipschitz.checked
    report.boxes_checked = report.d_increasing.checked
    logger.info("Verified %s: %s", C.label, "pass" if report.passed else "fail")
    return report


@dataclass
class MarginAuditReport:
    dim: int
    k: int
    step: Fraction
    bound: Fraction
    margin_bound: Fraction
    max_difference: Fraction = _ZERO
    worst_pair: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None
    worst_point: Optional[UnitPoint] = None
    pairs_checked: int = 0
    points_checked: int = 0
    margin_sets: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_difference <= self.bound and self.bound < self.margin_bound


def grid_count(step: Fraction) -> int:
    """m for a step 1/m."""
    step = Fraction(step)
    if step <= 0 or step > 1 or step.numerator != 1:
        raise GridStepError(f"grid step must be 1/m for a positive integer m, got {step}")
    return step.denominator


def audit_margins(C: CopulaTerm, k: int, step: Fraction) -> MarginAuditReport:
    """Compare every pair of (d-k)-margins of C on the grid {0, step, ..., 1}^(d-k).

    Margins are aligned in sorted kept-axis order. Requires d > 3 and
    1 <= k < (d-1)/2, the range in which (d-1)/(d+1) < (d-k-1)/(d-k)
    makes the comparison informative.
    """
    d = C.dim
    if d <= 3 or not (1 <= k and 2 * k < d - 1):
        raise PreconditionError(f"margin audit needs d > 3 and 1 <= k < (d-1)/2, got d={d}, k={k}")
    m = grid_count(step)
    size = d - k
    kept_sets = list(itertools.combinations(range(1, d + 1), size))
    margins = [margin(C, kept) for kept in kept_sets]
    report = MarginAuditReport(dim=d, k=k, step=Fraction(step), bound=theorem_bound(d),
                               margin_bound=Fraction(size - 1, size), margin_sets=kept_sets)
    report.pairs_checked = len(kept_sets) * (len(kept_sets) - 1) // 2
    ticks = [Fraction(i, m) for i in range(m + 1)]
    for coords in itertools.product(ticks, repeat=size):
        report.points_checked += 1
        values = [M.value(coords) for M in margins]
        low, high = min(values), max(values)
        if high - low > report.max_difference:
            report.max_difference = high - low
            a = kept_sets[values.index(low)]
            b = kept_sets[values.index(high)]
            report.worst_pair = (min(a, b), max(a, b))
            report.worst_point = UnitPoint(coords)
    logger.info("Margin audit d=%d k=%d: max pair difference %s over %d points",
                 d, k, report.max_difference, report.points_checked)
    return report
