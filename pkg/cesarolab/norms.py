import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from cesarolab.series import BallPoint, Evaluable
from cesarolab.workers import map_blocks

logger = logging.getLogger(__name__)

DEFAULT_LADDER_DEPTH = 14
DEFAULT_REFINE_ITERS = 40
DIRECTIONS_MULTIVARIATE = 256
ANGLES_UNIVARIATE = 512

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
RADIUS_RTOL = 1e-12

Objective = Callable[[np.ndarray], np.ndarray]

SAMPLER_KEYS = {"samples_per_radius", "ladder_depth", "refine_iters", "seed"}


def _unit_rows(vectors: Iterable[Sequence[complex]]) -> tuple[tuple[complex, ...], ...]:
    rows = []
    for v in vectors:
        arr = np.array(v, dtype=complex).ravel()
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise ValueError("Extra direction must be nonzero")
        rows.append(tuple(complex(x) for x in arr / norm))
    return tuple(rows)


@dataclass(frozen=True)
class SamplerConfig:
    """Layered sampler: radius ladder r_j = 1 − 2^{−j} times directions, then golden-section refinement.

    Args:
        directions_per_radius: Directions per ladder radius (default 512 angles for n = 1, 256 otherwise)
        ladder_depth (int): J, the number of ladder radii
        refinement_iters (int): Golden-section iterations along the best radius, 0 disables refinement
        rng_seed (int): Seed of the direction generator
        extra_directions: Unit vectors sampled at every radius, e.g. a/|a| for an anchored test function
        extra_points: Explicit points added to the sample set, e.g. a certificate point z = a
    """

    directions_per_radius: Optional[int] = None
    ladder_depth: int = DEFAULT_LADDER_DEPTH
    refinement_iters: int = DEFAULT_REFINE_ITERS
    rng_seed: int = 0
    extra_directions: tuple = field(default=())
    extra_points: tuple = field(default=())

    def __post_init__(self):
        if self.ladder_depth < 1:
            raise ValueError(f"Ladder depth must be at least 1, got {self.ladder_depth}")
        if self.directions_per_radius is not None and self.directions_per_radius < 1:
            raise ValueError(f"Need at least one direction per radius, got {self.directions_per_radius}")
        if self.refinement_iters < 0:
            raise ValueError(f"Refinement iterations must be nonnegative, got {self.refinement_iters}")
        object.__setattr__(self, "extra_directions", _unit_rows(self.extra_directions))
        points = tuple(tuple(complex(x) for x in BallPoint(p).coords) for p in self.extra_points)
        object.__setattr__(self, "extra_points", points)

    def directions_for(self, n: int) -> int:
        if self.directions_per_radius is not None:
            return self.directions_per_radius
        return ANGLES_UNIVARIATE if n == 1 else DIRECTIONS_MULTIVARIATE

    def radii(self) -> np.ndarray:
        j = np.arange(1, self.ladder_depth + 1, dtype=float)
        return 1.0 - 2.0**-j

    def with_extra(
        self, directions: Iterable[Sequence[complex]] = (), points: Iterable[Sequence[complex]] = ()
    ) -> "SamplerConfig":
        """Copy with more extra directions and points appended."""
        return replace(
            self,
            extra_directions=self.extra_directions + tuple(tuple(d) for d in directions),
            extra_points=self.extra_points + tuple(tuple(p) for p in points),
        )

    @classmethod
    def from_yaml(cls, yml: dict):
        """Create a sampler config from the `sampler` section of a run config."""
        unknown = sorted(set(yml) - SAMPLER_KEYS)
        if unknown:
            raise ValueError(f"Unknown sampler keys: {', '.join(unknown)}")
        return cls(
            directions_per_radius=yml.get("samples_per_radius"),
            ladder_depth=yml.get("ladder_depth", DEFAULT_LADDER_DEPTH),
            refinement_iters=yml.get("refine_iters", DEFAULT_REFINE_ITERS),
            rng_seed=yml.get("seed", 0),
        )

    def to_dict(self) -> dict:
        return {
            "samples_per_radius": self.directions_per_radius,
            "ladder_depth": self.ladder_depth,
            "refine_iters": self.refinement_iters,
            "seed": self.rng_seed,
            "extra_directions": [[[c.real, c.imag] for c in d] for d in self.extra_directions],
            "extra_points": [[[c.real, c.imag] for c in p] for p in self.extra_points],
        }


@dataclass(frozen=True)
class NormEstimate:
    """A sampled lower bound of a sup-type norm together with where it was attained."""

    objective: str
    value: float
    argmax: BallPoint
    samples_used: int
    refined: bool

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "value": self.value,
            "argmax_coords": [[c.real, c.imag] for c in self.argmax.coords],
            "samples_used": self.samples_used,
            "refined": self.refined,
        }


def _directions(cfg: SamplerConfig, n: int) -> np.ndarray:
    m = cfg.directions_for(n)
    if n == 1:
        theta = 2.0 * np.pi * np.arange(m) / m
        dirs = np.exp(1j * theta)[:, None]
    else:
        # One draw of shape (m, n, 2) so that fewer directions are a prefix of more
        rng = np.random.default_rng(cfg.rng_seed)
        g = rng.standard_normal((m, n, 2))
        dirs = g[..., 0] + 1j * g[..., 1]
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    if cfg.extra_directions:
        extra = np.array(cfg.extra_directions, dtype=complex)
        if extra.shape[1] != n:
            raise ValueError(f"Extra directions have {extra.shape[1]} coordinates, expected {n}")
        dirs = np.vstack([dirs, extra])
    return dirs


def sample_array(cfg: SamplerConfig, n: int) -> np.ndarray:
    """All sample points as a (P, n) array: ladder radius outer, direction inner, extra points last."""
    if n < 1:
        raise ValueError(f"Dimension must be at least 1, got {n}")
    dirs = _directions(cfg, n)
    radii = cfg.radii()
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, n)
    if cfg.extra_points:
        extra = np.array(cfg.extra_points, dtype=complex)
        if extra.shape[1] != n:
            raise ValueError(f"Extra points have {extra.shape[1]} coordinates, expected {n}")
        pts = np.vstack([pts, extra])
    return pts


def sample_points(cfg: SamplerConfig, n: int) -> list[BallPoint]:
    """The sampler's point set, deterministic given cfg.rng_seed."""
    return [BallPoint(p) for p in sample_array(cfg, n)]


def golden_section_max(
    fn: Callable[[float], float], lo: float, hi: float, iters: int
) -> tuple[float, float, int]:
    """Golden-section search for a maximum of fn on [lo, hi].

    Only interior points are evaluated. Returns the best point seen, its value and the
    number of evaluations.
    """
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = fn(x1)
    f2 = fn(x2)
    best_x, best_f = (x1, f1) if f1 >= f2 else (x2, f2)
    evaluations = 2
    for _ in range(iters):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = fn(x1)
            x, fx = x1, f1
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = fn(x2)
            x, fx = x2, f2
        evaluations += 1
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f, evaluations


def _bracket(radii: np.ndarray, r: float) -> tuple[float, float]:
    """Neighbouring ladder radii of r; a radius recomputed from a sample matches its rung up to rounding."""
    tol = RADIUS_RTOL * max(r, 1.0)
    below = radii[radii < r - tol]
    above = radii[radii > r + tol]
    lo = float(below.max()) if below.size else 0.0
    hi = float(above.min()) if above.size else r
    return lo, hi


def _one_minus_norm_squared(points: np.ndarray) -> np.ndarray:
    return 1.0 - np.sum(np.abs(points) ** 2, axis=1)


def maximize(objective: Objective, n: int, cfg: SamplerConfig, name: str) -> NormEstimate:
    """Sample the objective on the layered point set, then refine along the radius of the best sample.

    Raises:
        ValueError: if any objective sample is not finite
    """
    pts = sample_array(cfg, n)
    values = map_blocks(objective, pts)
    if not np.all(np.isfinite(values)):
        bad = pts[~np.isfinite(values)][0]
        raise ValueError(f"Non-finite {name} objective at z = {bad.tolist()}")
    idx = int(np.argmax(values))
    best = float(values[idx])
    best_pt = pts[idx]
    used = pts.shape[0]
    refined = False
    r = float(np.linalg.norm(best_pt))
    if cfg.refinement_iters > 0 and r > 0.0:
        zeta = best_pt / r
        lo, hi = _bracket(cfg.radii(), r)
        if hi > lo:
            logger.debug(f"Refining {name} along |z| in [{lo}, {hi}]")

            def along(rho: float) -> float:
                return float(objective((rho * zeta)[None, :])[0])

            x, fx, evaluations = golden_section_max(along, lo, hi, cfg.refinement_iters)
            used += evaluations
            if math.isfinite(fx) and fx > best:
                best, best_pt, refined = fx, x * zeta, True
    logger.debug(f"{name}: {best} after {used} samples")
    return NormEstimate(name, best, BallPoint(best_pt), used, refined)


def value_at_origin(F: Evaluable) -> complex:
    return complex(F.evaluate_at(np.zeros((1, F.dim), dtype=complex))[0])


def sup_norm(F: Evaluable, cfg: SamplerConfig = SamplerConfig()) -> NormEstimate:
    """‖F‖_∞ = sup |F(z)|."""

    def objective(pts: np.ndarray) -> np.ndarray:
        return np.abs(F.evaluate_at(pts))

    return maximize(objective, F.dim, cfg, "hinf")


def bloch_seminorm(F: Evaluable, cfg: SamplerConfig = SamplerConfig()) -> NormEstimate:
    """sup (1−|z|²)|RF(z)|."""
    RF = F.radial()

    def objective(pts: np.ndarray) -> np.ndarray:
        return _one_minus_norm_squared(pts) * np.abs(RF.evaluate_at(pts))

    return maximize(objective, F.dim, cfg, "bloch")


def log_bloch_seminorm(F: Evaluable, cfg: SamplerConfig = SamplerConfig()) -> NormEstimate:
    """sup (1−|z|²)|RF(z)|·log(2/(1−|z|²))."""
    RF = F.radial()

    def objective(pts: np.ndarray) -> np.ndarray:
        s = _one_minus_norm_squared(pts)
        return s * np.abs(RF.evaluate_at(pts)) * np.log(2.0 / s)

    return maximize(objective, F.dim, cfg, "logbloch")


def zygmund_norm(F: Evaluable, cfg: SamplerConfig = SamplerConfig()) -> NormEstimate:
    """‖F‖ = |F(0)| + ‖RF‖_B = |F(0)| + sup (1−|z|²)|RRF(z)|."""
    c0 = abs(value_at_origin(F))
    RRF = F.radial(2)

    def objective(pts: np.ndarray) -> np.ndarray:
        return c0 + _one_minus_norm_squared(pts) * np.abs(RRF.evaluate_at(pts))

    return maximize(objective, F.dim, cfg, "zygmund")


NORMS = {
    "hinf": sup_norm,
    "bloch": bloch_seminorm,
    "logbloch": log_bloch_seminorm,
    "zygmund": zygmund_norm,
}


def pointwise_log_bound(F: Evaluable, cfg: SamplerConfig = SamplerConfig()) -> float:
    """Empirical constant in |F(z) − F(0)| ≤ C·log(2/(1−|z|²))·‖F‖_B, over sampled z ≠ 0."""
    bloch = bloch_seminorm(F, cfg).value
    if bloch == 0.0:
        return 0.0
    pts = sample_array(cfg, F.dim)
    pts = pts[np.linalg.norm(pts, axis=1) > 0.0]
    c0 = value_at_origin(F)
    s = _one_minus_norm_squared(pts)
    ratios = np.abs(map_blocks(F.evaluate_at, pts) - c0) / (np.log(2.0 / s) * bloch)
    return float(ratios.max()) if ratios.size else 0.0


def sup_to_zygmund_ratio(F: Evaluable, cfg: SamplerConfig = SamplerConfig()) -> float:
    """‖F‖_∞ / ‖F‖ for the sampled estimates; 0 for the zero function."""
    z = zygmund_norm(F, cfg).value
    return 0.0 if z == 0.0 else sup_norm(F, cfg).value / z


def boundary_factor(r: np.ndarray, power: int = 1) -> np.ndarray:
    """(1−r²)·log(2/(1−r²))^power, which decays to 0 as r → 1."""
    s = 1.0 - np.asarray(r, dtype=float) ** 2
    return s * np.log(2.0 / s) ** power
