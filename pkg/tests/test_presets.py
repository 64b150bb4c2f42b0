import math
import unittest

from cesarolab.operators import Sum
from cesarolab.presets import (
    DEFAULT_CAP,
    Expectation,
    as_series,
    resolve_preset,
    standard_family,
)
from cesarolab.series import TruncatedSeries, constant, monomial
from cesarolab.testfns import CompositeRadial, log_kernel
from tests.fixtures import Z


class TestResolvePreset(unittest.TestCase):
    def test_series_presets(self):
        test_cases = [
            {"name": "one", "text": "one", "dim": 2, "expected": constant(2, DEFAULT_CAP, 1.0)},
            {"name": "zero", "text": "zero", "dim": 1, "expected": constant(1, DEFAULT_CAP, 0.0)},
            {"name": "zj default", "text": "zj", "dim": 2, "expected": monomial(2, DEFAULT_CAP, (1, 0))},
            {"name": "zj second", "text": "zj(2)", "dim": 3, "expected": monomial(3, DEFAULT_CAP, (0, 1, 0))},
            {"name": "padded", "text": " one ", "dim": 1, "expected": constant(1, DEFAULT_CAP, 1.0)},
        ]
        for test_case in test_cases:
            with self.subTest(case=test_case["name"]):
                g, expectation = resolve_preset(test_case["text"], test_case["dim"])
                self.assertEqual(test_case["expected"], g)
                self.assertEqual(Expectation.BOUNDED, expectation)

    def test_log_kernel(self):
        g, expectation = resolve_preset("log-kernel", 2)
        self.assertIsInstance(g, CompositeRadial)
        self.assertEqual([1.0, 0.0], list(g.anchor.real))
        self.assertEqual(Expectation.UNBOUNDED, expectation)
        g, expectation = resolve_preset("log-kernel(0.5)", 1)
        self.assertEqual([0.5], list(g.anchor.real))
        self.assertEqual(Expectation.BOUNDED, expectation)

    def test_random_poly(self):
        g, expectation = resolve_preset("random-poly(7, 4)", 2)
        self.assertEqual(4, g.degree)
        self.assertEqual(DEFAULT_CAP, g.cap)
        self.assertEqual(g, resolve_preset("random-poly(7,4)", 2)[0])
        big, _ = resolve_preset("random-poly(1,20)", 1, cap=8)
        self.assertEqual(20, big.cap)

    def test_errors(self):
        test_cases = [
            {"name": "unknown", "text": "bergman", "dim": 1},
            {"name": "malformed", "text": "one((", "dim": 1},
            {"name": "coordinate out of range", "text": "zj(3)", "dim": 2},
            {"name": "coordinate not a number", "text": "zj(x)", "dim": 2},
            {"name": "radius outside", "text": "log-kernel(1.5)", "dim": 1},
            {"name": "missing degree", "text": "random-poly(1)", "dim": 1},
            {"name": "dimension zero", "text": "one", "dim": 0},
        ]
        for test_case in test_cases:
            with self.subTest(case=test_case["name"]):
                with self.assertRaises(ValueError):
                    resolve_preset(test_case["text"], test_case["dim"])


class TestAsSeries(unittest.TestCase):
    def test_as_series(self):
        self.assertIs(Z, as_series(Z))
        s = as_series(log_kernel([0.5]), cap=6)
        self.assertEqual(6, s.cap)
        self.assertAlmostEqual(math.log(2.0), s.constant_term.real)
        self.assertAlmostEqual(0.5**3 / 3, s.coefficient((3,)).real)
        with self.assertRaises(TypeError):
            as_series(Sum(Z, Z))


class TestStandardFamily(unittest.TestCase):
    def test_members(self):
        for dim, size in ((1, 12), (2, 13), (3, 13)):
            with self.subTest(dim=dim):
                family = standard_family(dim)
                self.assertEqual(size, len(family))
                self.assertTrue(all(isinstance(f, TruncatedSeries) and f.dim == dim for f in family))
                self.assertEqual(constant(dim, 8, 1.0), family[0])

    def test_random_members_normalized(self):
        for f in standard_family(2, seed=3)[-3:]:
            self.assertAlmostEqual(1.0, sum(abs(c) for c in f.coeffs.values()))

    def test_deterministic(self):
        self.assertEqual(standard_family(2, seed=1), standard_family(2, seed=1))
        self.assertNotEqual(standard_family(2, seed=1)[-1], standard_family(2, seed=2)[-1])

    def test_max_degree(self):
        family = standard_family(1, max_degree=4)
        self.assertEqual(1 + 4 + 1, len(family))
        self.assertTrue(all(f.degree <= 4 for f in family))

