import io
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from cesarolab.io import dumps_json, encode_complex, function_summary, write_rows_csv
from cesarolab.norms import (
    SamplerConfig,
    bloch_seminorm,
    boundary_factor,
    golden_section_max,
    log_bloch_seminorm,
    pointwise_log_bound,
    sample_array,
    sup_norm,
    sup_to_zygmund_ratio,
    zygmund_norm,
)
from cesarolab.operators import (
    apply_M,
    apply_T,
    identity_eq1,
    image_I,
    kernel_bound_ratio,
    kernel_L,
    raise_caps,
)
from cesarolab.presets import Expectation, as_series, standard_family
from cesarolab.quadrature import DEFAULT_NODES
from cesarolab.series import BallPoint, Evaluable, TruncatedSeries, constant, monomial, radial_derivative
from cesarolab.testfns import THRESHOLD_RADIUS, CompositeRadial, f_a, f_k, h_a

logger = logging.getLogger(__name__)

EPSILON = 0.05
"""Slack between a sampled norm and a pointwise lower bound."""

IDENTITY_TOLERANCE = 1e-12
CERTIFICATE_TOLERANCE = 1e-8
GROWTH_FACTOR = 2.0
GROWTH_BASE_RADIUS = 0.99
BAND_RATIO = 10.0
POINTWISE_LOG_LIMIT = 100.0
ZYGMUND_MONOMIAL_LIMIT = 1.2

DEFAULT_A_RADII = (0.9, 0.99, 0.999, 0.9999)
DEFAULT_K_RADII = (0.9, 0.99, 0.999)
DEFAULT_K_VALUES = (8, 16, 32, 64)
DEFAULT_PROBE_K_VALUES = (4, 8, 16, 32, 64)
FAMILY_RADII = (0.8, 0.9, 0.99, 0.999, 0.9999)

SQRT_LOG_ARGMAX = 2.0 / math.e**2
SQRT_LOG_MAX = 2.0 * math.sqrt(2.0) / math.e
STATED_SQRT_LOG_BOUND = (2.0 / math.e) * (1.0 - math.log(2.0))
"""Stated bound (2/e)(1−log 2) on √t·log(2/t) over (0,1]; smaller than the value log 2 at t = 1."""

ASSERTIONS = {
    "t_g_one_identity": "‖T_g 1‖ equals the Bloch seminorm of Rg",
    "bounded_on_family": "every Zygmund ratio over the test family is finite",
    "compactness_decay": "‖T_g(z₁^k/k)‖ at the largest k is below its value at the smallest k",
    "pointwise_certificate": "(1−|a|²)|RRf_a(a)g(a) + Rf_a(a)Rg(a)| equals |a|⁴|g(a)|",
    "certificate_lower_bound": "every sampled norm is at least (1−ε) times its pointwise lower bound",
    "bounded_ratio_band": "max/min of ‖I_g f_a‖/‖f_a‖ over the grid stays below 10",
    "ratio_growth": "‖I_g f_a‖/‖f_a‖ grows by a factor of at least 2 from |a| ≈ 0.99 to the largest |a|",
    "norms_bounded_below": "min over radii of ‖I_g f_k‖ is at least (1−ε) times the smallest lower bound",
    "vanish_on_compacts": "max |f_k| on |z| ≤ 1/2 is smaller at the largest radius than at the smallest",
    "sum_identity": "T_g f + I_g f = M_g f − f(0)g(0) coefficientwise",
    "unit_test_function": "‖M_g 1‖ is at least ‖g‖",
    "sqrt_log_maximum": "max of √t·log(2/t) is 2√2/e at t = 2/e² by golden section and by grid",
    "stated_constant_discrepancy": "the stated bound (2/e)(1−log 2) lies below the true maximum",
    "boundary_factor_decay": "(1−r²)log(2/(1−r²)) decreases along the ladder and its squared-log form decays",
    "sup_norm_decay": "‖z^k/k‖_∞ strictly decreases in k",
    "zygmund_bounded": "‖z^k/k‖ stays below 1.2",
    "kernel_vanishes_at_zero": "L(z,w) = 0 when ⟨z,w⟩ = 0",
    "kernel_self_convergence": "L(z,w) at 64 nodes agrees with a 640-node reference within 1e−8",
    "kernel_bound_finite": "|L(z,w)|·|1−⟨z,w⟩|^{n+β} stays finite over the sampled pairs",
    "sup_to_zygmund_finite": "‖F‖_∞/‖F‖ is finite over the family and the h_a, f_a grid",
    "pointwise_log_bound": "the empirical pointwise log-growth constant stays below 100 on the family",
    "h_a_band": "max/min of ‖h_a‖ over the anchor grid stays below 10",
    "f_a_band": "max/min of ‖f_a‖ over the anchor grid stays below 10",
}
"""Named assertions; every verdict of a report is one of these."""


@dataclass
class ExperimentReport:
    """Tabular result of one experiment.

    Args:
        experiment (str): Experiment id
        config (dict): Parameters the experiment ran with
        grid (dict): The parameter grid, e.g. radii or k values
        rows (list): One measurement dict per grid point
        verdicts (dict): Assertion name to pass/fail
        summary (dict): Scalar results that belong to no row
        notes (list): Free-text remarks, e.g. recorded discrepancies
        metadata (dict): Seed and, on request, a timestamp
    """

    experiment: str
    config: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def verdict(self, name: str, ok: Any):
        if name not in ASSERTIONS:
            raise ValueError(f"Unknown assertion: {name}")
        self.verdicts[name] = bool(ok)
        if not ok:
            logger.info(f"{self.experiment}: assertion {name} failed ({ASSERTIONS[name]})")

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "grid": self.grid,
            "rows": self.rows,
            "verdicts": self.verdicts,
            "summary": self.summary,
            "notes": self.notes,
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        write_rows_csv(self.rows, buf)
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        data = json.loads(text)
        return cls(**data)


def _at(F: Evaluable, z: BallPoint) -> complex:
    return complex(F.evaluate_at(z.coords[None, :])[0])


def _zygmund(F: Evaluable, cfg: SamplerConfig) -> float:
    return zygmund_norm(F, cfg).value


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0.0 else 0.0


def _band_ok(values: Sequence[float]) -> bool:
    hi, lo = max(values), min(values)
    if lo <= 0.0:
        return hi <= 0.0
    return hi / lo < BAND_RATIO


def _base_config(cfg: SamplerConfig, nodes: Optional[int] = None, **extra: Any) -> dict:
    out: dict = {"sampler": cfg.to_dict()}
    if nodes is not None:
        out["nodes"] = nodes
    out.update(extra)
    return out


def theorem1_experiment(
    g: TruncatedSeries,
    family: Sequence[TruncatedSeries],
    cfg: SamplerConfig = SamplerConfig(),
    k_values: Sequence[int] = DEFAULT_K_VALUES,
) -> ExperimentReport:
    """Boundedness and compactness of T_g on the Zygmund space.

    Rows cover the identity ‖T_g 1‖ = ‖Rg‖_B, the ratios ‖T_g f‖/‖f‖ over the family,
    and the decay of ‖T_g(z₁^k/k)‖ in k.

    Raises:
        ValueError: if the family is empty
        TypeError: if g or a family member is not a series
    """
    if not family:
        raise ValueError("The test family is empty")
    if not isinstance(g, TruncatedSeries):
        raise TypeError(f"T_g experiments need a series symbol, got {type(g).__name__}")
    n = g.dim
    report = ExperimentReport(
        "theorem1",
        config=_base_config(cfg, family_size=len(family)),
        grid={"k_values": list(k_values)},
    )

    t_g_one = apply_T(g, constant(n, g.cap, 1.0))
    identity_lhs = _zygmund(t_g_one, cfg)
    identity_rhs = bloch_seminorm(radial_derivative(g), cfg).value
    report.rows.append(
        {"part": "identity", "index": 0, "zygmund_f": 1.0, "zygmund_image": identity_lhs, "ratio": identity_lhs}
    )
    report.summary["t_g_one_zygmund"] = identity_lhs
    report.summary["bloch_of_rg"] = identity_rhs
    report.verdict("t_g_one_identity", abs(identity_lhs - identity_rhs) <= 1e-10 * max(1.0, identity_rhs))

    ratios = []
    for i, f in enumerate(family):
        if not isinstance(f, TruncatedSeries):
            raise TypeError(f"Family member {i} is not a series")
        gg, ff = raise_caps(g, f)
        zf = _zygmund(f, cfg)
        zt = _zygmund(apply_T(gg, ff), cfg)
        ratio = _ratio(zt, zf)
        ratios.append(ratio)
        logger.debug(f"theorem1 family[{i}]: {zt} / {zf}")
        report.rows.append({"part": "family", "index": i, "zygmund_f": zf, "zygmund_image": zt, "ratio": ratio})
    report.summary["max_family_ratio"] = max(ratios)
    report.verdict("bounded_on_family", all(math.isfinite(r) for r in ratios))

    decay = []
    for k in k_values:
        alpha = [k] + [0] * (n - 1)
        fk = monomial(n, k, alpha, 1.0 / k)
        gg, ff = raise_caps(g, fk)
        zf = _zygmund(fk, cfg)
        zt = _zygmund(apply_T(gg, ff), cfg)
        decay.append(zt)
        report.rows.append(
            {"part": "compactness", "index": k, "zygmund_f": zf, "zygmund_image": zt, "ratio": _ratio(zt, zf)}
        )
    if decay:
        first, last = decay[0], decay[-1]
        report.verdict("compactness_decay", last < first or (first == 0.0 and last == 0.0))
    return report


def anchor_grid(radii: Sequence[float], dim: int) -> list[BallPoint]:
    """Anchors r·e₁ for each radius."""
    return [BallPoint.along(r, dim) for r in radii]


def _check_radii(radii: Sequence[float]):
    for r in radii:
        if not THRESHOLD_RADIUS - 1e-12 <= r < 1.0:
            raise ValueError(f"Radius {r} outside [sqrt(1 - 2/e), 1) = [{THRESHOLD_RADIUS:.6g}, 1)")


def _certificate_config(cfg: SamplerConfig, a: BallPoint) -> SamplerConfig:
    return cfg.with_extra(directions=[a.coords / a.norm], points=[a.coords])


def _symbol_config(g: Evaluable, cfg: SamplerConfig, anchors: Sequence[BallPoint] = ()) -> SamplerConfig:
    """Sampler for the norms of g itself: grid directions plus the anchor direction of a composite g."""
    directions = [a.coords / a.norm for a in anchors]
    if isinstance(g, CompositeRadial):
        r = float(np.linalg.norm(g.anchor))
        if r > 0.0:
            directions.append(g.anchor / r)
    return cfg.with_extra(directions=directions)


def theorem2_experiment(
    g: Evaluable,
    a_grid: Sequence[BallPoint],
    cfg: SamplerConfig = SamplerConfig(),
    nodes: int = DEFAULT_NODES,
    expectation: Optional[Expectation] = None,
) -> ExperimentReport:
    """Boundedness of I_g, witnessed through h_a and f_a.

    Each row holds ‖I_g h_a‖, ‖I_g f_a‖, their ratios to ‖h_a‖ and ‖f_a‖, the pointwise
    certificate at z = a and the log-Bloch term |a|²(1−|a|²)|Rg(a)|log(2/(1−|a|²)).
    A series symbol defaults to the bounded expectation; composite symbols get no
    band or growth verdict unless an expectation is given.

    Raises:
        ValueError: if the grid is empty, leaves the validity range or has the wrong dimension
    """
    if not a_grid:
        raise ValueError("The anchor grid is empty")
    _check_radii([a.norm for a in a_grid])
    for a in a_grid:
        if a.dim != g.dim:
            raise ValueError(f"Dimension mismatch: anchor has {a.dim} coordinates, g has {g.dim}")
    if expectation is None and isinstance(g, TruncatedSeries):
        expectation = Expectation.BOUNDED
    report = ExperimentReport(
        "theorem2",
        config=_base_config(cfg, nodes, expect=None if expectation is None else expectation.value),
        grid={"radii": [a.norm for a in a_grid]},
    )
    Rg = g.radial()
    certificates_ok = True
    lower_ok = True
    for a in a_grid:
        r = a.norm
        s = 1.0 - r**2
        ha, fa = h_a(a), f_a(a)
        cfg_a = _certificate_config(cfg, a)
        z_h = _zygmund(ha, cfg_a)
        z_f = _zygmund(fa, cfg_a)
        z_ih = _zygmund(image_I(g, ha, nodes), cfg_a)
        z_if = _zygmund(image_I(g, fa, nodes), cfg_a)
        g_a = _at(g, a)
        rg_a = _at(Rg, a)
        lower = r**4 * abs(g_a)
        certificate = s * abs(_at(fa.radial(2), a) * g_a + _at(fa.radial(), a) * rg_a)
        log_bloch_term = r**2 * s * abs(rg_a) * math.log(2.0 / s)
        certificates_ok &= abs(certificate - lower) <= CERTIFICATE_TOLERANCE * max(1.0, lower)
        lower_ok &= z_if >= (1.0 - EPSILON) * lower
        logger.debug(f"theorem2 |a|={r}: |I_g f_a|={z_if}, lower bound {lower}")
        report.rows.append(
            {
                "radius": r,
                "zygmund_h": z_h,
                "zygmund_f": z_f,
                "zygmund_ig_h": z_ih,
                "zygmund_ig_f": z_if,
                "ratio_h": _ratio(z_ih, z_h),
                "ratio_f": _ratio(z_if, z_f),
                "g_at_a": encode_complex(g_a),
                "lower_bound": lower,
                "certificate": certificate,
                "log_bloch_term": log_bloch_term,
            }
        )
    report.verdict("pointwise_certificate", certificates_ok)
    report.verdict("certificate_lower_bound", lower_ok)

    ratios = [row["ratio_f"] for row in report.rows]
    if expectation == Expectation.BOUNDED:
        report.verdict("bounded_ratio_band", _band_ok(ratios))
    elif expectation == Expectation.UNBOUNDED:
        radii = [row["radius"] for row in report.rows]
        top = max(range(len(radii)), key=lambda i: radii[i])
        base = min(range(len(radii)), key=lambda i: abs(radii[i] - GROWTH_BASE_RADIUS))
        growth = _ratio(ratios[top], ratios[base]) if top != base else 0.0
        report.summary["growth"] = growth
        report.verdict("ratio_growth", growth >= GROWTH_FACTOR)

    cfg_g = _symbol_config(g, cfg, a_grid)
    report.summary["g_hinf"] = sup_norm(g, cfg_g).value
    report.summary["g_logbloch"] = log_bloch_seminorm(g, cfg_g).value
    return report


def _compact_sup(F: Evaluable, cfg: SamplerConfig) -> float:
    """max |F| over the sampler directions at |z| = 1/2, the first ladder radius."""
    plain = SamplerConfig(directions_per_radius=cfg.directions_per_radius, ladder_depth=1, rng_seed=cfg.rng_seed)
    pts = sample_array(plain, F.dim)
    return float(np.max(np.abs(F.evaluate_at(pts))))


def theorem3_experiment(
    g: Evaluable,
    radii: Sequence[float] = DEFAULT_K_RADII,
    cfg: SamplerConfig = SamplerConfig(),
    nodes: int = DEFAULT_NODES,
    literal_prefactor: bool = False,
) -> ExperimentReport:
    """Non-compactness of I_g for g ≢ 0, witnessed through f_k anchored at z_k = r_k·e₁.

    Raises:
        ValueError: if the radii are empty or outside [sqrt(1 − 2/e), 1)
    """
    if not radii:
        raise ValueError("No radii given")
    _check_radii(radii)
    n = g.dim
    report = ExperimentReport(
        "theorem3",
        config=_base_config(cfg, nodes, literal_prefactor=literal_prefactor),
        grid={"radii": list(radii)},
    )
    norms, lowers, sups = [], [], []
    for r in radii:
        zk = BallPoint.along(r, n)
        fk = f_k(zk, literal_prefactor=literal_prefactor)
        z_ig = _zygmund(image_I(g, fk, nodes), _certificate_config(cfg, zk))
        g_zk = _at(g, zk)
        lower = r**4 * abs(g_zk)
        sup_compact = _compact_sup(fk, cfg)
        norms.append(z_ig)
        lowers.append(lower)
        sups.append(sup_compact)
        logger.debug(f"theorem3 r={r}: |I_g f_k|={z_ig}, lower bound {lower}")
        report.rows.append(
            {
                "radius": r,
                "zygmund_ig_fk": z_ig,
                "lower_bound": lower,
                "g_at_zk": encode_complex(g_zk),
                "compact_sup_fk": sup_compact,
            }
        )
    report.verdict("certificate_lower_bound", all(v >= (1.0 - EPSILON) * lb for v, lb in zip(norms, lowers)))
    if min(lowers) > 0.0:
        report.verdict("norms_bounded_below", min(norms) >= (1.0 - EPSILON) * min(lowers))
    if len(radii) > 1:
        top = max(range(len(radii)), key=lambda i: radii[i])
        bottom = min(range(len(radii)), key=lambda i: radii[i])
        report.verdict("vanish_on_compacts", sups[top] < sups[bottom])
    report.summary["min_zygmund_ig_fk"] = min(norms)
    return report


def corollary_experiment(
    g: TruncatedSeries,
    family: Sequence[TruncatedSeries],
    cfg: SamplerConfig = SamplerConfig(),
) -> ExperimentReport:
    """Boundedness of M_g: ratios ‖gf‖/‖f‖, the sum identity and g's norms side by side.

    Raises:
        ValueError: if the family is empty
        TypeError: if g is not a series
    """
    if not family:
        raise ValueError("The test family is empty")
    if not isinstance(g, TruncatedSeries):
        raise TypeError(f"M_g experiments need a series symbol, got {type(g).__name__}")
    report = ExperimentReport("corollary", config=_base_config(cfg, family_size=len(family)))
    ratios, residuals = [], []
    for i, f in enumerate(family):
        gg, ff = raise_caps(g, f)
        zf = _zygmund(f, cfg)
        zm = _zygmund(apply_M(gg, ff), cfg)
        residual = identity_eq1(gg, ff)
        ratios.append(_ratio(zm, zf))
        residuals.append(residual)
        report.rows.append({"index": i, "zygmund_f": zf, "zygmund_mg_f": zm, "ratio": ratios[-1], "residual": residual})
    report.verdict("bounded_on_family", all(math.isfinite(r) for r in ratios))
    report.verdict("sum_identity", max(residuals) <= IDENTITY_TOLERANCE)

    g_zygmund = _zygmund(g, cfg)
    unit_ratio = _zygmund(apply_M(g, constant(g.dim, g.cap, 1.0)), cfg)
    report.verdict("unit_test_function", unit_ratio >= g_zygmund * (1.0 - IDENTITY_TOLERANCE))
    report.summary.update(
        {
            "max_ratio": max(ratios),
            "max_residual": max(residuals),
            "unit_ratio": unit_ratio,
            "g_zygmund": g_zygmund,
            "g_hinf": sup_norm(g, cfg).value,
            "g_logbloch": log_bloch_seminorm(g, cfg).value,
        }
    )
    return report


def _sqrt_log(t):
    return np.sqrt(t) * np.log(2.0 / t)


def _random_ball_points(rng: np.random.Generator, count: int, dim: int, max_radius: float) -> np.ndarray:
    g = rng.standard_normal((count, dim, 2))
    dirs = g[..., 0] + 1j * g[..., 1]
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    return rng.uniform(0.0, max_radius, size=count)[:, None] * dirs


def elementary_probes(
    cfg: SamplerConfig = SamplerConfig(),
    dim: int = 2,
    seed: int = 0,
    beta: float = 2.0,
    pairs: int = 500,
    nodes: int = DEFAULT_NODES,
    k_values: Sequence[int] = DEFAULT_PROBE_K_VALUES,
) -> ExperimentReport:
    """Constants and decay facts the boundedness arguments lean on, each as a probe row."""
    report = ExperimentReport(
        "probes",
        config=_base_config(cfg, nodes, dim=dim, beta=beta, pairs=pairs),
        grid={"k_values": list(k_values), "ladder_depth": cfg.ladder_depth},
    )

    t_star, best, _ = golden_section_max(lambda t: float(_sqrt_log(t)), 0.0, 1.0, 100)
    grid = np.linspace(1e-6, 1.0, 1_000_000)
    grid_values = _sqrt_log(grid)
    grid_idx = int(np.argmax(grid_values))
    report.rows.append(
        {
            "probe": "sqrt_log_maximum",
            "argmax": t_star,
            "value": best,
            "grid_argmax": float(grid[grid_idx]),
            "grid_value": float(grid_values[grid_idx]),
            "expected_argmax": SQRT_LOG_ARGMAX,
            "expected_value": SQRT_LOG_MAX,
        }
    )
    report.rows.append(
        {
            "probe": "stated_constant",
            "value": STATED_SQRT_LOG_BOUND,
            "value_at_one": math.log(2.0),
            "expected_value": SQRT_LOG_MAX,
        }
    )
    report.notes.append(
        f"max of sqrt(t)*log(2/t) on (0,1] is {best:.9f} at t = {t_star:.9f}; "
        f"the stated bound (2/e)(1 - log 2) = {STATED_SQRT_LOG_BOUND:.9f} is too small"
    )
    report.verdict(
        "sqrt_log_maximum",
        abs(best - SQRT_LOG_MAX) <= 1e-6
        and abs(t_star - SQRT_LOG_ARGMAX) <= 1e-6
        and abs(grid_values[grid_idx] - SQRT_LOG_MAX) <= 1e-6,
    )
    report.verdict("stated_constant_discrepancy", STATED_SQRT_LOG_BOUND < best)

    ladder = cfg.radii()
    single = boundary_factor(ladder, 1)
    squared = boundary_factor(ladder, 2)
    for j, (r, f1, f2) in enumerate(zip(ladder, single, squared), start=1):
        report.rows.append(
            {"probe": "boundary_factor", "index": j, "radius": float(r), "value": float(f1), "squared": float(f2)}
        )
    decreasing = bool(np.all(np.diff(single[1:]) < 0.0))
    squared_decay = squared[-1] < squared[min(5, len(squared) - 1)] if len(squared) > 6 else True
    report.verdict("boundary_factor_decay", decreasing and squared_decay)

    sups, zygs = [], []
    for k in k_values:
        fk = monomial(1, k, [k], 1.0 / k)
        sups.append(sup_norm(fk, cfg).value)
        zygs.append(_zygmund(fk, cfg))
        report.rows.append({"probe": "monomial_sequence", "index": k, "value": sups[-1], "zygmund": zygs[-1]})
    report.verdict("sup_norm_decay", all(b < a for a, b in zip(sups, sups[1:])))
    report.verdict("zygmund_bounded", max(zygs) < ZYGMUND_MONOMIAL_LIMIT)

    origin_pair = kernel_L(BallPoint.along(0.5, 2, 0), BallPoint.along(0.5, 2, 1), beta, nodes)
    half = BallPoint([math.sqrt(0.5)])
    coarse = kernel_L(half, half, beta, nodes)
    fine = kernel_L(half, half, beta, 10 * nodes)
    report.rows.append(
        {"probe": "kernel_reference", "value": encode_complex(coarse), "reference": encode_complex(fine)}
    )
    report.verdict("kernel_vanishes_at_zero", origin_pair == 0)
    report.verdict("kernel_self_convergence", abs(coarse - fine) <= 1e-8)

    rng = np.random.default_rng(seed)
    zs = _random_ball_points(rng, pairs, dim, 0.9995)
    ws = _random_ball_points(rng, pairs, dim, 0.9995)
    kernel_ratios = [kernel_bound_ratio(BallPoint(z), BallPoint(w), beta, nodes) for z, w in zip(zs, ws)]
    worst = max(kernel_ratios) if kernel_ratios else 0.0
    report.rows.append({"probe": "kernel_bound", "value": worst, "pairs": pairs})
    report.verdict("kernel_bound_finite", math.isfinite(worst))

    family = standard_family(dim, seed)
    log_bounds = [pointwise_log_bound(F, cfg) for F in family]
    report.rows.append({"probe": "pointwise_log_bound", "value": max(log_bounds)})
    report.verdict("pointwise_log_bound", max(log_bounds) < POINTWISE_LOG_LIMIT)

    sup_ratios = [sup_to_zygmund_ratio(F, cfg) for F in family]
    band_h, band_f = [], []
    for a in anchor_grid(FAMILY_RADII, dim):
        cfg_a = _certificate_config(cfg, a)
        ha, fa = h_a(a), f_a(a)
        band_h.append(_zygmund(ha, cfg_a))
        band_f.append(_zygmund(fa, cfg_a))
        sup_ratios.append(_ratio(sup_norm(ha, cfg_a).value, band_h[-1]))
        sup_ratios.append(_ratio(sup_norm(fa, cfg_a).value, band_f[-1]))
        report.rows.append(
            {"probe": "anchored_family", "radius": a.norm, "value": band_h[-1], "zygmund_f_a": band_f[-1]}
        )
    report.rows.append({"probe": "sup_to_zygmund", "value": max(sup_ratios)})
    report.verdict("sup_to_zygmund_finite", all(math.isfinite(r) for r in sup_ratios))
    report.verdict("h_a_band", _band_ok(band_h))
    report.verdict("f_a_band", _band_ok(band_f))
    return report


EXPERIMENTS = ("theorem1", "theorem2", "theorem3", "corollary", "probes")


def run_experiment(
    name: str,
    /,
    g: Optional[Evaluable] = None,
    cfg: SamplerConfig = SamplerConfig(),
    dim: int = 1,
    seed: int = 0,
    nodes: int = DEFAULT_NODES,
    radii: Optional[Sequence[float]] = None,
    k_values: Optional[Sequence[int]] = None,
    expectation: Optional[Expectation] = None,
    literal_prefactor: bool = False,
) -> ExperimentReport:
    """Dispatch an experiment by name; composites are expanded where a series symbol is needed.

    The symbol as given is recorded under config["g"].
    """
    if name not in EXPERIMENTS:
        raise ValueError(f"Unknown experiment: {name}")
    logger.debug(f"Running {name} with dim={dim}, seed={seed}, nodes={nodes}")
    if name == "probes":
        report = elementary_probes(
            cfg, dim=max(dim, 1), seed=seed, nodes=nodes, k_values=k_values or DEFAULT_PROBE_K_VALUES
        )
    else:
        if g is None:
            raise ValueError(f"Experiment {name} needs a symbol g")
        if g.dim != dim:
            raise ValueError(f"Dimension mismatch: g has {g.dim} variables, --dim is {dim}")
        if name == "theorem1":
            report = theorem1_experiment(as_series(g), standard_family(dim, seed), cfg, k_values or DEFAULT_K_VALUES)
        elif name == "theorem2":
            report = theorem2_experiment(g, anchor_grid(radii or DEFAULT_A_RADII, dim), cfg, nodes, expectation)
        elif name == "theorem3":
            report = theorem3_experiment(g, radii or DEFAULT_K_RADII, cfg, nodes, literal_prefactor)
        else:
            report = corollary_experiment(as_series(g), standard_family(dim, seed), cfg)
        report.config["g"] = function_summary(g)
    report.metadata["seed"] = seed
    return report

