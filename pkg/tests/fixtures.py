"""Shared builders for the test suite."""

import numpy as np
from hypothesis import strategies as st

from cesarolab.norms import SamplerConfig
from cesarolab.series import BallPoint, TruncatedSeries, from_univariate, make_series, multi_indices

# Lighter sampler for multivariate or composite objectives where no 1e-4 oracle is asserted
QUICK_SAMPLER = SamplerConfig(directions_per_radius=48, ladder_depth=14, refinement_iters=30)

Z = from_univariate([0.0, 1.0], 1)
"""z in one variable."""

Z_SQUARED = from_univariate([0.0, 0.0, 1.0], 2)

coefficients = st.complex_numbers(min_magnitude=1e-3, max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def polynomials(draw, dim: int, max_degree: int, cap: int) -> TruncatedSeries:
    """Sparse polynomials with up to eight terms of order ≤ max_degree."""
    indices = multi_indices(dim, max_degree)
    chosen = draw(st.lists(st.sampled_from(indices), max_size=8, unique=True))
    values = draw(st.lists(coefficients, min_size=len(chosen), max_size=len(chosen)))
    return make_series(dim, cap, list(zip(chosen, values)))


def random_points(count: int, dim: int, max_radius: float, seed: int = 0) -> list[BallPoint]:
    """Points with uniform direction and radius in [0, max_radius]."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, dim, 2))
    dirs = g[..., 0] + 1j * g[..., 1]
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    radii = rng.uniform(0.0, max_radius, size=count)
    return [BallPoint(r * d) for r, d in zip(radii, dirs)]


def partial_radial(s: TruncatedSeries, z: BallPoint) -> complex:
    """Σ_j z_j ∂s/∂z_j(z) from term-wise partial derivatives."""
    total = 0j
    coords = z.coords
    for alpha, c in s.coeffs.items():
        for j, e in enumerate(alpha):
            if e == 0:
                continue
            term = c * e
            for i, (zi, ei) in enumerate(zip(coords, alpha)):
                term *= complex(zi) ** (ei - 1 if i == j else ei)
            total += coords[j] * term
    return total
