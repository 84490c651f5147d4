"""Unit tests for the sampled copula-axiom checks and the margin audit."""
from __future__ import annotations

import pathlib
import sys
import unittest
from fractions import Fraction as F

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))

import axioms
import copula
import shuffle
from copula import CopulaTerm, HyperBox
from errors import GridStepError, PreconditionError


class ConstantOne(CopulaTerm):
    """Not grounded: 1 everywhere."""

    def __init__(self, dim):
        self.dim = dim

    def value(self, coords):
        return F(1)


class ScaledIndependence(CopulaTerm):
    """2 * Pi_2, which breaks the Lipschitz bound."""

    dim = 2

    def value(self, coords):
        return 2 * coords[0] * coords[1]


class TestSingleChecks(unittest.TestCase):
    def test_grounded(self):
        self.assertTrue(axioms.check_grounded(copula.frechet_upper(3), 300, seed=1).passed)
        self.assertTrue(axioms.check_grounded(copula.c_star_closed_form(4), 300, seed=1).passed)
        result = axioms.check_grounded(ConstantOne(3), 300, seed=1)
        self.assertFalse(result.passed)
        self.assertEqual(result.checked, 1)
        self.assertIn(0, result.witness["point"].coords)

    def test_uniform_margins(self):
        self.assertTrue(axioms.check_uniform_margins(copula.independence(4), 300, seed=2).passed)
        S = shuffle.Shuffle(shuffle.build_manifold_structure(4, (F(1, 20), F(3, 20))))
        self.assertTrue(axioms.check_uniform_margins(S, 300, seed=2).passed)
        self.assertTrue(axioms.check_uniform_margins(copula.frechet_lower(3), 300, seed=2).passed)

    def test_w3_witness_box(self):
        result = axioms.check_d_increasing(copula.frechet_lower(3), 0, seed=3)
        self.assertFalse(result.passed)
        self.assertEqual(result.witness["box"], HyperBox.cube(F(1, 2), 1, 3))
        self.assertEqual(result.witness["volume"], F(-1, 2))

    def test_d_increasing_passes_for_copulas(self):
        self.assertTrue(axioms.check_d_increasing(copula.frechet_upper(4), 300, seed=4, directed=False).passed)
        result = axioms.check_d_increasing(copula.c_star_closed_form(3), 300, seed=4)
        self.assertTrue(result.passed)
        # 10 lattice boxes per axis in d = 3, plus the random ones
        self.assertEqual(result.checked, 1000 + 300)

    def test_random_pass_finds_w3_violation(self):
        result = axioms.check_d_increasing(copula.frechet_lower(3), 2000, seed=5, directed=False)
        self.assertFalse(result.passed)
        self.assertLess(result.witness["volume"], 0)
        self.assertEqual(copula.box_volume(copula.frechet_lower(3), result.witness["box"]), result.witness["volume"])

    def test_lipschitz(self):
        self.assertTrue(axioms.check_lipschitz(copula.frechet_upper(5), 300, seed=6).passed)
        self.assertTrue(axioms.check_lipschitz(copula.c_star_closed_form(4), 300, seed=6).passed)
        result = axioms.check_lipschitz(ScaledIndependence(), 300, seed=6)
        self.assertFalse(result.passed)
        self.assertGreater(result.witness["change"], result.witness["distance"])


class TestVerify(unittest.TestCase):
    def test_w2_is_a_copula(self):
        report = axioms.verify(copula.frechet_lower(2), samples=200, boxes=200, seed=7)
        self.assertTrue(report.passed)
        self.assertTrue(report.expected_copula)

    def test_w3_fails_only_d_increasing(self):
        report = axioms.verify(copula.frechet_lower(3), samples=200, boxes=200, seed=7)
        self.assertFalse(report.passed)
        self.assertFalse(report.expected_copula)
        self.assertEqual(report.first_failure().name, "d_increasing")
        self.assertTrue(report.grounded.passed and report.uniform_margins.passed and report.lipschitz.passed)

    def test_validated_structures_pass(self):
        structures = [
            shuffle.build_c_star_structure(3),
            shuffle.build_c_star_structure(3, shuffle.BaseCopula.INDEPENDENCE),
            shuffle.build_manifold_structure(4, (F(1, 10), F(1, 10))),
            shuffle.build_manifold_structure(4, (F(1, 20), F(3, 20)), shuffle.BaseCopula.INDEPENDENCE),
        ]
        for S in structures:
            report = axioms.verify(shuffle.Shuffle(S), samples=150, boxes=150, seed=8)
            self.assertTrue(report.passed, msg=str(report.first_failure()))

    def test_reports_are_deterministic(self):
        first = axioms.verify(copula.c_star_closed_form(2), samples=100, boxes=100, seed=9)
        second = axioms.verify(copula.c_star_closed_form(2), samples=100, boxes=100, seed=9)
        self.assertEqual(first, second)
        self.assertEqual(first.points_checked, 300)


class TestMarginAudit(unittest.TestCase):
    def test_c_star_five(self):
        report = axioms.audit_margins(copula.c_star_closed_form(5), 1, F(1, 6))
        self.assertTrue(report.passed)
        self.assertLessEqual(report.max_difference, F(2, 3))
        self.assertEqual(report.margin_bound, F(3, 4))
        self.assertEqual(len(report.margin_sets), 5)
        self.assertEqual(report.points_checked, 7 ** 4)

    def test_four_dimensions_runs(self):
        report = axioms.audit_margins(copula.c_star_closed_form(4), 1, F(1, 5))
        self.assertEqual(report.bound, F(3, 5))
        self.assertEqual(report.margin_bound, F(2, 3))
        self.assertTrue(report.passed)

    def test_exchangeable_margins_coincide(self):
        report = axioms.audit_margins(copula.independence(5), 1, F(1, 4))
        self.assertEqual(report.max_difference, 0)
        self.assertIsNone(report.worst_pair)

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            axioms.audit_margins(copula.independence(3), 1, F(1, 4))
        with self.assertRaises(PreconditionError):
            axioms.audit_margins(copula.independence(5), 2, F(1, 4))
        with self.assertRaises(GridStepError):
            axioms.audit_margins(copula.independence(5), 1, F(2, 5))


if __name__ == "__main__":
    unittest.main()
