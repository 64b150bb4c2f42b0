import logging
import re
from enum import Enum
from typing import Optional

import numpy as np

from cesarolab.series import Evaluable, TruncatedSeries, constant, monomial, random_polynomial, scale
from cesarolab.testfns import CompositeRadial, expand, log_kernel

logger = logging.getLogger(__name__)

DEFAULT_CAP = 16
"""Degree cap of preset series."""

FAMILY_MAX_DEGREE = 8
FAMILY_RANDOM_DEGREES = (2, 5, 8)

_PRESET_RE = re.compile(r"^(?P<name>[a-z][a-z\-]*)(?:\((?P<args>[^()]*)\))?$")


class PresetName(Enum):
    """PresetName lists the built-in symbols accepted by --g.

    ONE: g ≡ 1.
    ZERO: g ≡ 0.
    ZJ: the coordinate z_j, written zj or zj(j) with 1-based j.
    LOG_KERNEL: log(2/(1−⟨z,e₁⟩)) anchored on the sphere, or log-kernel(r) anchored at r·e₁.
    RANDOM_POLY: random-poly(seed,deg), a complex Gaussian polynomial."""

    ONE = "one"
    ZERO = "zero"
    ZJ = "zj"
    LOG_KERNEL = "log-kernel"
    RANDOM_POLY = "random-poly"


class Expectation(Enum):
    """Expectation of an experiment symbol: BOUNDED selects the band verdict, UNBOUNDED the growth verdict."""

    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"


def _args(raw: Optional[str]) -> list[str]:
    if raw is None or raw.strip() == "":
        return []
    return [x.strip() for x in raw.split(",")]


def resolve_preset(text: str, dim: int, cap: int = DEFAULT_CAP) -> tuple[Evaluable, Expectation]:
    """Resolve a preset name into a symbol together with its expected membership.

    Raises:
        ValueError: if the name or its arguments are not recognised
    """
    m = _PRESET_RE.match(text.strip())
    if not m:
        raise ValueError(f"Malformed preset: {text!r}")
    try:
        name = PresetName(m.group("name"))
    except ValueError:
        raise ValueError(f"Unknown preset: {m.group('name')}")
    args = _args(m.group("args"))
    if dim < 1:
        raise ValueError(f"Dimension must be at least 1, got {dim}")
    try:
        if name == PresetName.ONE:
            return constant(dim, cap, 1.0), Expectation.BOUNDED
        if name == PresetName.ZERO:
            return constant(dim, cap, 0.0), Expectation.BOUNDED
        if name == PresetName.ZJ:
            j = int(args[0]) if args else 1
            if not 1 <= j <= dim:
                raise ValueError(f"Coordinate index {j} outside 1..{dim}")
            alpha = [0] * dim
            alpha[j - 1] = 1
            return monomial(dim, cap, alpha), Expectation.BOUNDED
        if name == PresetName.LOG_KERNEL:
            anchor = np.zeros(dim, dtype=complex)
            if args:
                r = float(args[0])
                if not 0.0 <= r < 1.0:
                    raise ValueError(f"log-kernel radius must be in [0, 1), got {r}")
                anchor[0] = r
                return log_kernel(anchor), Expectation.BOUNDED
            anchor[0] = 1.0
            return log_kernel(anchor, closed=True), Expectation.UNBOUNDED
        if len(args) != 2:
            raise ValueError("random-poly takes (seed,deg)")
        seed, degree = int(args[0]), int(args[1])
        return random_polynomial(dim, degree, cap=max(cap, degree), seed=seed), Expectation.BOUNDED
    except (IndexError, TypeError) as e:
        raise ValueError(f"Bad arguments for preset {name.value}: {e}")


def as_series(F: Evaluable, cap: int = DEFAULT_CAP) -> TruncatedSeries:
    """Series form of a symbol: series pass through, composites are expanded to the cap."""
    if isinstance(F, TruncatedSeries):
        return F
    if isinstance(F, CompositeRadial):
        logger.debug(f"Expanding {F.label} to degree {cap}")
        return expand(F, cap)
    raise TypeError(f"No series form for {type(F).__name__}")


def _l1_normalized(s: TruncatedSeries) -> TruncatedSeries:
    total = sum(abs(c) for c in s.coeffs.values())
    return s if total == 0 else scale(s, 1.0 / total)


def standard_family(dim: int, seed: int = 0, max_degree: int = FAMILY_MAX_DEGREE) -> list[TruncatedSeries]:
    """Fixed test family: 1, z₁^k/k for k = 1..max_degree, and random polynomials.

    Random polynomials are scaled to unit ℓ¹ coefficient mass, which bounds their
    Zygmund norms by a degree-dependent constant. Mixed monomials join for dim > 1.
    """
    family = [constant(dim, max_degree, 1.0)]
    for k in range(1, max_degree + 1):
        alpha = [k] + [0] * (dim - 1)
        family.append(monomial(dim, max_degree, alpha, 1.0 / k))
    if dim > 1:
        family.append(monomial(dim, max_degree, [1, 1] + [0] * (dim - 2)))
    rng = np.random.default_rng(seed)
    for degree in FAMILY_RANDOM_DEGREES:
        if degree <= max_degree:
            family.append(_l1_normalized(random_polynomial(dim, degree, cap=max_degree, rng=rng)))
    return family
