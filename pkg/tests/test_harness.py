import json
import math
import unittest
from unittest import mock

from cesarolab.harness import (
    ASSERTIONS,
    SQRT_LOG_ARGMAX,
    SQRT_LOG_MAX,
    STATED_SQRT_LOG_BOUND,
    ExperimentReport,
    anchor_grid,
    corollary_experiment,
    elementary_probes,
    run_experiment,
    theorem1_experiment,
    theorem2_experiment,
    theorem3_experiment,
)
from cesarolab.norms import SamplerConfig
from cesarolab.presets import Expectation, standard_family
from cesarolab.series import constant, random_polynomial
from cesarolab.testfns import log_kernel
from tests.fixtures import QUICK_SAMPLER, Z


class TestExperimentReport(unittest.TestCase):
    def test_verdicts(self):
        report = ExperimentReport("theorem3")
        self.assertTrue(report.passed)
        report.verdict("certificate_lower_bound", True)
        self.assertTrue(report.passed)
        report.verdict("vanish_on_compacts", False)
        self.assertFalse(report.passed)
        self.assertEqual({"certificate_lower_bound": True, "vanish_on_compacts": False}, report.verdicts)
        with self.assertRaises(ValueError):
            report.verdict("made_up", True)

    def test_json(self):
        report = ExperimentReport("probes", grid={"k_values": [4, 8]}, rows=[{"probe": "x", "value": 1.5}])
        report.verdict("zygmund_bounded", True)
        report.notes.append("note")
        text = report.to_json()
        self.assertTrue(text.endswith("\n"))
        self.assertEqual(report.to_dict(), json.loads(text))
        self.assertEqual(report, ExperimentReport.from_json(text))

    def test_csv(self):
        rows = [{"radius": 0.9, "g_at_a": [1.0, 0.0]}, {"radius": 0.99, "extra": 2}]
        text = ExperimentReport("theorem2", rows=rows).to_csv()
        self.assertEqual('radius,g_at_a,extra\n0.9,"[1.0, 0.0]",\n0.99,,2\n', text)


class TestTheorem1Experiment(unittest.TestCase):
    def test_constant_symbol(self):
        report = theorem1_experiment(constant(1, 4, 2.0), standard_family(1), QUICK_SAMPLER)
        self.assertTrue(report.passed)
        self.assertEqual([0.0], sorted({row["ratio"] for row in report.rows}))

    def test_coordinate_symbol(self):
        report = theorem1_experiment(Z, standard_family(1), QUICK_SAMPLER)
        self.assertTrue(report.passed)
        decay = [row["zygmund_image"] for row in report.rows if row["part"] == "compactness"]
        self.assertEqual(4, len(decay))
        self.assertTrue(all(b < a for a, b in zip(decay, decay[1:])))
        self.assertLess(decay[-1], decay[0] / 4)

    def test_identity(self):
        for seed in range(3):
            with self.subTest(seed=seed):
                g = random_polynomial(2, 5, seed=seed)
                report = theorem1_experiment(g, [constant(2, 1, 1.0)], QUICK_SAMPLER, k_values=(8,))
                self.assertTrue(report.verdicts["t_g_one_identity"])
                self.assertAlmostEqual(report.summary["bloch_of_rg"], report.summary["t_g_one_zygmund"], places=9)

    def test_errors(self):
        with self.assertRaises(ValueError):
            theorem1_experiment(Z, [], QUICK_SAMPLER)
        with self.assertRaises(TypeError):
            theorem1_experiment(log_kernel([0.5]), standard_family(1), QUICK_SAMPLER)  # type: ignore[arg-type]


class TestTheorem2Experiment(unittest.TestCase):
    def test_bounded_symbol(self):
        report = theorem2_experiment(constant(1, 2, 1.0), anchor_grid((0.9, 0.99, 0.999, 0.9999), 1))
        self.assertTrue(report.passed, report.verdicts)
        self.assertIn("bounded_ratio_band", report.verdicts)
        self.assertNotIn("ratio_growth", report.verdicts)
        for row in report.rows:
            with self.subTest(radius=row["radius"]):
                self.assertAlmostEqual(row["radius"] ** 4, row["lower_bound"])
                self.assertAlmostEqual(row["lower_bound"], row["certificate"], places=8)
                self.assertEqual(0.0, row["log_bloch_term"])
                self.assertGreaterEqual(row["zygmund_ig_f"], 0.95 * row["lower_bound"])

    def test_log_kernel_diverges(self):
        g = log_kernel([1.0], closed=True)
        report = theorem2_experiment(g, anchor_grid((0.9, 0.99, 0.999, 0.9999), 1), expectation=Expectation.UNBOUNDED)
        self.assertTrue(report.passed, report.verdicts)
        self.assertGreaterEqual(report.summary["growth"], 2.0)
        terms = [row["log_bloch_term"] for row in report.rows]
        self.assertTrue(all(b > a for a, b in zip(terms, terms[1:])))

    def test_symbol_sup_follows_anchor_direction(self):
        g = log_kernel([1.0, 0.0], closed=True)
        sups = []
        for depth in (8, 14):
            cfg = SamplerConfig(directions_per_radius=16, ladder_depth=depth, refinement_iters=10)
            report = theorem2_experiment(g, anchor_grid((0.9,), 2), cfg)
            top = 1.0 - 2.0**-depth
            with self.subTest(depth=depth):
                self.assertGreaterEqual(report.summary["g_hinf"], math.log(2.0 / (1.0 - top)) - 1e-9)
            sups.append(report.summary["g_hinf"])
        self.assertGreater(sups[1], sups[0] + 4.0 * math.log(2.0))

    def test_composite_without_expectation(self):
        report = theorem2_experiment(log_kernel([0.5]), anchor_grid((0.9, 0.99), 1), QUICK_SAMPLER)
        self.assertNotIn("bounded_ratio_band", report.verdicts)
        self.assertNotIn("ratio_growth", report.verdicts)
        self.assertIsNone(report.config["expect"])

    def test_errors(self):
        test_cases = [
            {"name": "below threshold", "g": constant(1, 2, 1.0), "grid": anchor_grid((0.5,), 1)},
            {"name": "empty grid", "g": constant(1, 2, 1.0), "grid": []},
            {"name": "dimension mismatch", "g": constant(2, 2, 1.0), "grid": anchor_grid((0.9,), 1)},
        ]
        for test_case in test_cases:
            with self.subTest(case=test_case["name"]):
                with self.assertRaises(ValueError):
                    theorem2_experiment(test_case["g"], test_case["grid"], QUICK_SAMPLER)


class TestTheorem3Experiment(unittest.TestCase):
    def test_unit_symbol(self):
        report = theorem3_experiment(constant(1, 2, 1.0))
        self.assertTrue(report.passed, report.verdicts)
        by_radius = {row["radius"]: row for row in report.rows}
        self.assertGreaterEqual(by_radius[0.99]["zygmund_ig_fk"], 0.91)
        self.assertGreaterEqual(report.summary["min_zygmund_ig_fk"], 0.5)
        self.assertEqual({"certificate_lower_bound", "norms_bounded_below", "vanish_on_compacts"}, set(report.verdicts))

    def test_zero_symbol(self):
        report = theorem3_experiment(constant(2, 2, 0.0), cfg=QUICK_SAMPLER)
        self.assertEqual(0.0, report.summary["min_zygmund_ig_fk"])
        self.assertNotIn("norms_bounded_below", report.verdicts)

    def test_literal_prefactor(self):
        report = theorem3_experiment(constant(1, 2, 1.0), (0.99,), QUICK_SAMPLER, literal_prefactor=True)
        self.assertTrue(report.config["literal_prefactor"])
        self.assertEqual(1, len(report.rows))

    def test_errors(self):
        for radii in ((), (0.5,), (0.9, 1.0)):
            with self.subTest(radii=radii):
                with self.assertRaises(ValueError):
                    theorem3_experiment(constant(1, 2, 1.0), radii, QUICK_SAMPLER)

    def test_deterministic(self):
        first = theorem3_experiment(Z, (0.9, 0.99), QUICK_SAMPLER)
        second = theorem3_experiment(Z, (0.9, 0.99), QUICK_SAMPLER)
        self.assertEqual(first.to_json(), second.to_json())
        self.assertEqual(first.to_csv(), second.to_csv())

    def test_thread_count_does_not_change_report(self):
        # 128 directions over 14 radii is more than one evaluation block
        cfg = SamplerConfig(directions_per_radius=128, ladder_depth=14, refinement_iters=10)
        texts = []
        for threads in (1, 4):
            with mock.patch("cesarolab.workers.worker_count", return_value=threads):
                texts.append(theorem3_experiment(Z, (0.9, 0.99), cfg).to_json())
        self.assertEqual(texts[0], texts[1])


class TestCorollaryExperiment(unittest.TestCase):
    def test_polynomial_symbol(self):
        report = corollary_experiment(random_polynomial(2, 3, seed=1), standard_family(2), QUICK_SAMPLER)
        self.assertTrue(report.passed, report.verdicts)
        self.assertLessEqual(report.summary["max_residual"], 1e-12)
        self.assertAlmostEqual(report.summary["g_zygmund"], report.summary["unit_ratio"])

    def test_errors(self):
        with self.assertRaises(ValueError):
            corollary_experiment(Z, [], QUICK_SAMPLER)
        with self.assertRaises(TypeError):
            corollary_experiment(log_kernel([0.5]), standard_family(1), QUICK_SAMPLER)  # type: ignore[arg-type]


class TestProbes(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.report = elementary_probes(QUICK_SAMPLER, dim=2, pairs=100)

    def test_verdicts(self):
        self.assertTrue(self.report.passed, self.report.verdicts)
        self.assertTrue(set(self.report.verdicts) <= set(ASSERTIONS))

    def test_sqrt_log(self):
        row = next(r for r in self.report.rows if r["probe"] == "sqrt_log_maximum")
        self.assertAlmostEqual(2.0 * math.sqrt(2.0) / math.e, row["value"], places=6)
        self.assertAlmostEqual(2.0 / math.e**2, row["argmax"], places=6)
        self.assertEqual(SQRT_LOG_ARGMAX, row["expected_argmax"])
        self.assertLess(STATED_SQRT_LOG_BOUND, SQRT_LOG_MAX)
        self.assertEqual(1, len(self.report.notes))

    def test_rows(self):
        kinds = [r["probe"] for r in self.report.rows]
        self.assertEqual(QUICK_SAMPLER.ladder_depth, kinds.count("boundary_factor"))
        self.assertEqual(5, kinds.count("monomial_sequence"))
        self.assertEqual(5, kinds.count("anchored_family"))
        for probe in ("stated_constant", "kernel_reference", "kernel_bound", "pointwise_log_bound", "sup_to_zygmund"):
            with self.subTest(probe=probe):
                self.assertEqual(1, kinds.count(probe))


class TestRunExperiment(unittest.TestCase):
    def test_dispatch(self):
        report = run_experiment("theorem3", g=constant(1, 2, 1.0), cfg=QUICK_SAMPLER, radii=(0.9, 0.99), seed=4)
        self.assertEqual("theorem3", report.experiment)
        self.assertEqual(4, report.metadata["seed"])
        self.assertEqual({"radii": [0.9, 0.99]}, report.grid)

    def test_composite_expanded_for_series_experiments(self):
        report = run_experiment("corollary", g=log_kernel([0.5]), cfg=QUICK_SAMPLER)
        self.assertTrue(report.verdicts["sum_identity"])

    def test_errors(self):
        test_cases = [
            {"name": "unknown experiment", "args": ("theorem4",), "kwargs": {"g": Z}},
            {"name": "missing symbol", "args": ("theorem1",), "kwargs": {}},
            {"name": "dimension mismatch", "args": ("theorem3",), "kwargs": {"g": Z, "dim": 2}},
        ]
        for test_case in test_cases:
            with self.subTest(case=test_case["name"]):
                with self.assertRaises(ValueError):
                    run_experiment(*test_case["args"], cfg=QUICK_SAMPLER, **test_case["kwargs"])

    def test_symbol_recorded(self):
        test_cases = [
            {"name": "series", "g": Z, "kind": "series"},
            {"name": "composite", "g": log_kernel([0.9]), "kind": "log_kernel"},
        ]
        for test_case in test_cases:
            with self.subTest(case=test_case["name"]):
                report = run_experiment("theorem3", g=test_case["g"], cfg=QUICK_SAMPLER, radii=(0.9,))
                self.assertEqual(test_case["kind"], report.config["g"]["kind"])
        self.assertNotIn("g", run_experiment("probes", cfg=QUICK_SAMPLER).config)

    def test_literal_prefactor_passed_through(self):
        report = run_experiment("theorem3", g=Z, cfg=QUICK_SAMPLER, radii=(0.99,), literal_prefactor=True)
        self.assertTrue(report.config["literal_prefactor"])

    def test_sampler_seed_recorded(self):
        cfg = SamplerConfig(directions_per_radius=8, ladder_depth=6, refinement_iters=5, rng_seed=9)
        report = run_experiment("theorem3", g=Z, cfg=cfg, radii=(0.9,))
        self.assertEqual(9, report.config["sampler"]["seed"])
