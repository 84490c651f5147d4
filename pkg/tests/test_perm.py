"""Unit tests for permutation actions, composition and decomposition."""
from __future__ import annotations

import pathlib
import sys
import unittest
from fractions import Fraction

# Ensure project root is in the Python path
sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))

import perm as perms
from copula import UnitPoint
from errors import DimensionMismatchError, PreconditionError, RationalParseError
from perm import Perm, Transposition


class TestApply(unittest.TestCase):
    def test_identity_keeps_point(self):
        u = (Fraction(1, 5), Fraction(7, 10))
        self.assertEqual(perms.apply(perms.identity(2), u), u)

    def test_reverse_on_unit_point(self):
        u = UnitPoint.of("0.6", "0.6", "0.8", 1)
        moved = perms.apply(perms.reverse(4), u)
        self.assertIsInstance(moved, UnitPoint)
        self.assertEqual(moved.coords, (1, Fraction(4, 5), Fraction(3, 5), Fraction(3, 5)))

    def test_images_select_coordinates(self):
        pi = Perm((3, 2, 4, 1))
        self.assertEqual(perms.apply(pi, ("a", "b", "c", "e")), ("c", "b", "e", "a"))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            perms.apply(perms.reverse(3), (1, 2))


class TestComposition(unittest.TestCase):
    def setUp(self):
        self.pi = Perm((3, 2, 4, 1))

    def test_identity_is_neutral(self):
        self.assertEqual(perms.compose(perms.identity(4), self.pi), self.pi)
        self.assertEqual(perms.compose(self.pi, perms.identity(4)), self.pi)

    def test_inverse_cancels(self):
        self.assertTrue(perms.compose(self.pi, perms.inverse(self.pi)).is_identity())

    def test_point_action_order(self):
        sigma, tau = Perm((2, 3, 1, 4)), Perm((1, 4, 3, 2))
        u = ("a", "b", "c", "e")
        self.assertEqual(perms.apply(perms.compose(sigma, tau), u),
                         perms.apply(tau, perms.apply(sigma, u)))

    def test_inverse_examples(self):
        self.assertEqual(perms.inverse(perms.identity(3)), perms.identity(3))
        t = perms.transposition(5, 2, 4)
        self.assertEqual(perms.inverse(t), t)
        self.assertEqual(perms.inverse(self.pi).images, (4, 2, 1, 3))


class TestDecompose(unittest.TestCase):
    def test_identity_is_empty(self):
        self.assertEqual(perms.decompose(perms.identity(4)), [])

    def test_single_transposition(self):
        self.assertEqual(perms.decompose(perms.transposition(4, 1, 3)), [Transposition(1, 3)])

    def test_two_transpositions_suffice(self):
        pi = Perm((3, 2, 4, 1))
        steps = perms.decompose(pi)
        self.assertEqual(steps, [Transposition(1, 4), Transposition(1, 3)])
        self.assertEqual(perms.replay(steps, 4), pi)
        # the other factorization of the same relabeling
        self.assertEqual(perms.replay([Transposition(3, 4), Transposition(1, 4)], 4), pi)

    def test_every_perm_replays(self):
        for d in range(2, 7):
            for pi in perms.all_perms(d):
                steps = perms.decompose(pi)
                self.assertLessEqual(len(steps), d - 1)
                self.assertEqual(perms.replay(steps, d), pi)


class TestHelpers(unittest.TestCase):
    def test_nonfixed_indices(self):
        self.assertEqual(perms.nonfixed_indices(perms.identity(3)), ())
        self.assertEqual(perms.nonfixed_indices(perms.transposition(6, 2, 5)), (2, 5))
        self.assertEqual(perms.nonfixed_indices(perms.cycle(5, [1, 3, 4])), (1, 3, 4))

    def test_is_transposition(self):
        self.assertTrue(perms.is_transposition(perms.transposition(4, 1, 4)))
        self.assertFalse(perms.is_transposition(perms.cycle(4, [1, 2, 3])))
        self.assertFalse(perms.is_transposition(perms.identity(4)))

    def test_transposition_is_canonical(self):
        t = Transposition(3, 1)
        self.assertEqual((t.i, t.j), (1, 3))
        with self.assertRaises(PreconditionError):
            Transposition(2, 2)

    def test_all_perms(self):
        listed = list(perms.all_perms(3))
        self.assertEqual(len(listed), 6)
        self.assertTrue(listed[0].is_identity())
        self.assertEqual(listed[-1], perms.reverse(3))

    def test_counts_and_moved_indices(self):
        factorials = {2: 2, 3: 6, 4: 24, 5: 120, 6: 720}
        for d, count in factorials.items():
            listed = list(perms.all_perms(d))
            self.assertEqual(len(set(listed)), count)
            for pi in listed:
                self.assertNotEqual(len(perms.nonfixed_indices(pi)), 1)
                self.assertEqual(perms.compose(pi, perms.inverse(pi)), perms.identity(d))

    def test_parse(self):
        self.assertEqual(Perm.parse("id", 3), perms.identity(3))
        self.assertEqual(Perm.parse("reverse", 3).images, (3, 2, 1))
        self.assertEqual(Perm.parse("2,1,3", 3).images, (2, 1, 3))
        with self.assertRaises(PreconditionError):
            Perm.parse("1,1,2", 3)
        with self.assertRaises(RationalParseError):
            Perm.parse("a,b", 2)
        with self.assertRaises(DimensionMismatchError):
            Perm.parse("2,1", 3)


if __name__ == "__main__":
    unittest.main()
