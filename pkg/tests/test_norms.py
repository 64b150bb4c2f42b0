import math
import unittest

import numpy as np

from cesarolab.norms import (
    NORMS,
    SamplerConfig,
    _bracket,
    bloch_seminorm,
    boundary_factor,
    golden_section_max,
    log_bloch_seminorm,
    pointwise_log_bound,
    sample_array,
    sample_points,
    sup_norm,
    sup_to_zygmund_ratio,
    zygmund_norm,
)
from cesarolab.series import constant, from_univariate, random_polynomial
from cesarolab.testfns import log_kernel
from tests.fixtures import QUICK_SAMPLER, Z, Z_SQUARED


def monomial_over_k(k: int):
    coeffs = [0.0] * (k + 1)
    coeffs[k] = 1.0 / k
    return from_univariate(coeffs, k)


class TestOracles(unittest.TestCase):
    def test_closed_forms(self):
        test_cases = [
            {"name": "sup of constant", "norm": sup_norm, "F": constant(2, 3, 2.0 - 1.5j),
             "expected": 2.5, "tol": 1e-15},
            {"name": "bloch of constant", "norm": bloch_seminorm, "F": constant(1, 3, 4.0),
             "expected": 0.0, "tol": 0.0},
            {"name": "log-bloch of constant", "norm": log_bloch_seminorm, "F": constant(1, 3, 4.0), "expected": 0.0,
             "tol": 0.0},
            {"name": "zygmund of constant", "norm": zygmund_norm, "F": constant(2, 3, -3.0),
             "expected": 3.0, "tol": 1e-15},
            {"name": "bloch of z", "norm": bloch_seminorm, "F": Z,
             "expected": 2.0 / (3.0 * math.sqrt(3.0)), "tol": 1e-4},
            {"name": "zygmund of z^2", "norm": zygmund_norm, "F": Z_SQUARED, "expected": 1.0, "tol": 1e-4},
        ]
        for test_case in test_cases:
            with self.subTest(case=test_case["name"]):
                estimate = test_case["norm"](test_case["F"])
                self.assertLessEqual(abs(estimate.value - test_case["expected"]), test_case["tol"])

    def test_sup_of_z(self):
        cfg = SamplerConfig()
        estimate = sup_norm(Z, cfg)
        self.assertLessEqual(cfg.radii()[-1] - 1e-15, estimate.value)
        self.assertLess(estimate.value, 1.0)

    def test_sup_of_monomials(self):
        top = SamplerConfig().radii()[-1]
        for k in (1, 4, 16, 64):
            with self.subTest(k=k):
                self.assertAlmostEqual(top**k / k, sup_norm(monomial_over_k(k)).value, places=12)

    def test_log_bloch_of_z(self):
        def profile(r: float) -> float:
            s = 1.0 - r * r
            return s * r * math.log(2.0 / s)

        _, expected, _ = golden_section_max(profile, 0.0, 1.0, 200)
        self.assertLessEqual(abs(log_bloch_seminorm(Z).value - expected), 1e-4)

    def test_log_kernel_sweep(self):
        values = [log_bloch_seminorm(log_kernel([r])).value for r in (0.9, 0.99, 0.999)]
        self.assertLess(values[0], values[1])
        self.assertLess(values[1], values[2])

    def test_zygmund_of_monomials_bounded(self):
        for k in (1, 2, 8, 16, 32, 64):
            with self.subTest(k=k):
                self.assertLess(zygmund_norm(monomial_over_k(k)).value, 1.2)

    def test_value_matches_argmax(self):
        estimate = zygmund_norm(Z_SQUARED)
        p = estimate.argmax.coords
        s = 1.0 - float(np.vdot(p, p).real)
        self.assertLessEqual(abs(estimate.value - s * abs(4.0 * p[0] ** 2)), 1e-12)
        self.assertTrue(estimate.refined)

    def test_refinement_bracket(self):
        radii = SamplerConfig().radii()
        test_cases = [
            {"name": "rung recomputed with rounding", "r": float(np.linalg.norm([0.75 * np.exp(0.3j)])),
             "expected": (0.5, 0.875)},
            {"name": "exact rung", "r": 0.75, "expected": (0.5, 0.875)},
            {"name": "first rung", "r": 0.5, "expected": (0.0, 0.75)},
            {"name": "between rungs", "r": 0.8, "expected": (0.75, 0.875)},
            {"name": "top rung", "r": float(radii[-1]), "expected": (float(radii[-2]), float(radii[-1]))},
        ]
        for test_case in test_cases:
            with self.subTest(case=test_case["name"]):
                lo, hi = _bracket(radii, test_case["r"])
                self.assertAlmostEqual(test_case["expected"][0], lo, places=15)
                self.assertAlmostEqual(test_case["expected"][1], hi, places=15)

    def test_refinement_reaches_interior_maximum(self):
        estimate = zygmund_norm(Z_SQUARED, SamplerConfig(directions_per_radius=7))
        self.assertTrue(estimate.refined)
        self.assertAlmostEqual(1.0 / math.sqrt(2.0), estimate.argmax.norm, places=6)
        self.assertAlmostEqual(1.0, estimate.value, places=10)

    def test_boundary_samples_rejected(self):
        # radii 1 - 2^-j round to 1.0 for large j, where the log kernel anchored on the sphere is singular
        with self.assertRaises(ValueError):
            sup_norm(log_kernel([1.0], closed=True), SamplerConfig(ladder_depth=60))


class TestSampler(unittest.TestCase):
    def test_univariate_equispaced(self):
        cfg = SamplerConfig(directions_per_radius=8, ladder_depth=1)
        pts = sample_array(cfg, 1)[:, 0]
        np.testing.assert_allclose(pts, 0.5 * np.exp(2j * np.pi * np.arange(8) / 8), atol=1e-15)

    def test_inside_ball_and_deterministic(self):
        cfg = SamplerConfig(directions_per_radius=16, rng_seed=3)
        points = sample_points(cfg, 3)
        self.assertEqual(16 * cfg.ladder_depth, len(points))
        self.assertTrue(all(p.norm < 1.0 for p in points))
        self.assertEqual(points, sample_points(cfg, 3))
        self.assertNotEqual(points, sample_points(SamplerConfig(directions_per_radius=16, rng_seed=4), 3))

    def test_unit_directions(self):
        cfg = SamplerConfig(directions_per_radius=32, ladder_depth=1)
        norms = np.linalg.norm(sample_array(cfg, 4), axis=1)
        np.testing.assert_allclose(norms, 0.5, atol=1e-12)

    def test_extras(self):
        cfg = SamplerConfig(directions_per_radius=4, ladder_depth=2)
        cfg = cfg.with_extra(directions=[[2.0, 0.0]], points=[[0.3, 0.4j]])
        pts = sample_array(cfg, 2)
        self.assertEqual(2 * 5 + 1, pts.shape[0])
        np.testing.assert_allclose(pts[-1], [0.3, 0.4j])
        np.testing.assert_allclose(pts[4], [0.5, 0.0])
        with self.assertRaises(ValueError):
            sample_array(cfg, 3)

    def test_monotone_in_samples(self):
        F = random_polynomial(2, 4, seed=5)
        few = SamplerConfig(directions_per_radius=16, refinement_iters=0)
        more = SamplerConfig(directions_per_radius=64, refinement_iters=0)
        for name, norm in sorted(NORMS.items()):
            with self.subTest(norm=name):
                self.assertLessEqual(norm(F, few).value, norm(F, more).value + 1e-12)
                self.assertLessEqual(norm(F, more).value, norm(F, more.with_extra(points=[[0.6, 0.6]])).value + 1e-12)

    def test_validation(self):
        test_cases = [
            {"name": "ladder depth", "kwargs": {"ladder_depth": 0}},
            {"name": "directions", "kwargs": {"directions_per_radius": 0}},
            {"name": "refinement", "kwargs": {"refinement_iters": -1}},
            {"name": "zero direction", "kwargs": {"extra_directions": ((0.0, 0.0),)}},
            {"name": "point outside", "kwargs": {"extra_points": ((1.0,),)}},
        ]
        for test_case in test_cases:
            with self.subTest(case=test_case["name"]):
                with self.assertRaises(ValueError):
                    SamplerConfig(**test_case["kwargs"])

    def test_from_yaml(self):
        cfg = SamplerConfig.from_yaml({"samples_per_radius": 32, "ladder_depth": 10, "refine_iters": 5, "seed": 7})
        self.assertEqual(SamplerConfig(directions_per_radius=32, ladder_depth=10, refinement_iters=5, rng_seed=7), cfg)
        self.assertEqual(32, cfg.to_dict()["samples_per_radius"])
        self.assertEqual(SamplerConfig(), SamplerConfig.from_yaml({}))
        with self.assertRaises(ValueError):
            SamplerConfig.from_yaml({"directions": 32})


class TestProbes(unittest.TestCase):
    def test_pointwise_log_bound(self):
        self.assertEqual(0.0, pointwise_log_bound(constant(1, 2, 3.0)))
        for F in (Z, Z_SQUARED, random_polynomial(2, 5, seed=1), log_kernel([0.9, 0.0])):
            with self.subTest(F=F):
                bound = pointwise_log_bound(F, QUICK_SAMPLER)
                self.assertTrue(math.isfinite(bound))
                self.assertLess(bound, 100.0)

    def test_sup_to_zygmund(self):
        self.assertEqual(0.0, sup_to_zygmund_ratio(constant(1, 2, 0.0)))
        self.assertAlmostEqual(1.0, sup_to_zygmund_ratio(constant(1, 2, 2.0)))
        ratio = sup_to_zygmund_ratio(Z)
        self.assertGreater(ratio, 2.5)
        self.assertLess(ratio, 2.7)

    def test_boundary_factor(self):
        radii = SamplerConfig().radii()
        for power in (1, 2):
            with self.subTest(power=power):
                values = boundary_factor(radii, power)
                # x·log(2/x)^p increases up to x = 2/e^p
                self.assertTrue(np.all(np.diff(values[power:]) < 0))
                self.assertLess(values[-1], 0.05)

    def test_golden_section(self):
        x, fx, evaluations = golden_section_max(lambda t: -((t - 0.3) ** 2), 0.0, 1.0, 60)
        self.assertAlmostEqual(0.3, x, places=6)
        self.assertAlmostEqual(0.0, fx, places=10)
        self.assertEqual(62, evaluations)
