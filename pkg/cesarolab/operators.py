import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np

from cesarolab.quadrature import DEFAULT_NODES, check_nodes, unit_interval_rule
from cesarolab.series import (
    BallPoint,
    Evaluable,
    TruncatedSeries,
    as_points,
    constant,
    from_univariate,
    max_coefficient_distance,
    multiply,
    radial_antiderivative,
    radial_derivative,
)

logger = logging.getLogger(__name__)


class OperatorKind(Enum):
    """OperatorKind names the operators the toolkit applies.

    TG: T_g f = ∫₀¹ f(tz) Rg(tz) dt/t, the extended Cesàro operator.
    IG: I_g f = ∫₀¹ Rf(tz) g(tz) dt/t, the companion operator.
    MG: M_g f = g·f.
    CESARO: the classical one-variable Cesàro operator on Taylor coefficients."""

    TG = "tg"
    IG = "ig"
    MG = "mg"
    CESARO = "cesaro"


def _require_series(*operands):
    for op in operands:
        if not isinstance(op, TruncatedSeries):
            raise TypeError(
                f"Coefficient-space operators need TruncatedSeries operands, got {type(op).__name__}; "
                "use image_T/image_I for composite symbols"
            )


def apply_T(g: TruncatedSeries, f: TruncatedSeries) -> TruncatedSeries:
    """T_g f = R⁻¹(f·Rg); exact because R(T_g f) = f·Rg and T_g f(0) = 0."""
    _require_series(g, f)
    return radial_antiderivative(multiply(f, radial_derivative(g)))


def apply_I(g: TruncatedSeries, f: TruncatedSeries) -> TruncatedSeries:
    """I_g f = R⁻¹((Rf)·g)."""
    _require_series(g, f)
    return radial_antiderivative(multiply(radial_derivative(f), g))


def apply_M(g: TruncatedSeries, f: TruncatedSeries) -> TruncatedSeries:
    _require_series(g, f)
    return multiply(g, f)


def raise_caps(g: TruncatedSeries, f: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries]:
    """Both operands under the cap max(cap g, cap f, deg g + deg f), so products lose no terms."""
    _require_series(g, f)
    cap = max(g.cap, f.cap, g.degree + f.degree)
    return g.with_cap(cap), f.with_cap(cap)


def identity_eq1(g: TruncatedSeries, f: TruncatedSeries) -> float:
    """Max coefficient residual of T_g f + I_g f − (M_g f − f(0)g(0)).

    Exact only when deg f + deg g ≤ min(cap); beyond that truncation breaks the identity.
    """
    lhs = apply_T(g, f) + apply_I(g, f)
    rhs = apply_M(g, f) - constant(f.dim, min(f.cap, g.cap), f.constant_term * g.constant_term)
    return max_coefficient_distance(lhs, rhs)


def classical_cesaro(coeffs: Sequence[complex], length: Union[int, None] = None) -> list[complex]:
    """b_j = (1/(j+1)) Σ_{k≤j} a_k for j = 0..length-1 (default len(coeffs))."""
    length = len(coeffs) if length is None else length
    a = np.zeros(length, dtype=complex)
    n = min(length, len(coeffs))
    a[:n] = np.asarray(coeffs, dtype=complex)[:n]
    b = np.cumsum(a) / np.arange(1, length + 1)
    return [complex(x) for x in b]


def cesaro_symbol(cap: int) -> TruncatedSeries:
    """g(z) = log(1/(1−z)) = Σ_{m≥1} z^m/m in one variable, so that Rg = Σ_{m≥1} z^m."""
    return from_univariate([0.0] + [1.0 / m for m in range(1, cap + 1)], cap)


@dataclass(frozen=True)
class OperatorSpec:
    """An operator kind together with its symbol g."""

    kind: OperatorKind
    symbol: Union[TruncatedSeries, Evaluable, None] = None

    def apply(self, f: TruncatedSeries) -> Union[TruncatedSeries, list[complex]]:
        if self.kind == OperatorKind.CESARO:
            if f.dim != 1:
                raise ValueError(f"The classical Cesàro operator acts on one variable, got dim {f.dim}")
            return classical_cesaro([f.coefficient((j,)) for j in range(f.cap + 1)])
        if self.symbol is None:
            raise ValueError(f"Operator {self.kind.value} needs a symbol g")
        if self.symbol.dim != f.dim:
            raise ValueError(f"Dimension mismatch: g has {self.symbol.dim} variables, f has {f.dim}")
        if self.kind == OperatorKind.TG:
            return apply_T(self.symbol, f)  # type: ignore[arg-type]
        if self.kind == OperatorKind.IG:
            return apply_I(self.symbol, f)  # type: ignore[arg-type]
        return apply_M(self.symbol, f)  # type: ignore[arg-type]

    def image(self, f: Evaluable, nodes: int = DEFAULT_NODES) -> Evaluable:
        """The operator image as a lazy evaluable, for any mix of series and composites."""
        if self.symbol is None or self.kind == OperatorKind.CESARO:
            raise ValueError(f"Operator {self.kind.value} has no lazy image")
        if self.kind == OperatorKind.TG:
            return image_T(self.symbol, f, nodes)
        if self.kind == OperatorKind.IG:
            return image_I(self.symbol, f, nodes)
        return image_M(self.symbol, f)


class Sum:
    """Pointwise sum of evaluables."""

    def __init__(self, *terms: Evaluable):
        if not terms:
            raise ValueError("Sum needs at least one term")
        dims = {t.dim for t in terms}
        if len(dims) != 1:
            raise ValueError(f"Dimension mismatch among terms: {sorted(dims)}")
        self.terms = terms

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def evaluate_at(self, points: np.ndarray) -> np.ndarray:
        out = self.terms[0].evaluate_at(points)
        for t in self.terms[1:]:
            out = out + t.evaluate_at(points)
        return out

    def radial(self, order: int = 1) -> Evaluable:
        return Sum(*(t.radial(order) for t in self.terms))


class Product:
    """Pointwise product a·b; its radial derivative follows the Leibniz rule exactly."""

    def __init__(self, a: Evaluable, b: Evaluable):
        if a.dim != b.dim:
            raise ValueError(f"Dimension mismatch: {a.dim} != {b.dim}")
        self.a = a
        self.b = b

    @property
    def dim(self) -> int:
        return self.a.dim

    def evaluate_at(self, points: np.ndarray) -> np.ndarray:
        return self.a.evaluate_at(points) * self.b.evaluate_at(points)

    def radial(self, order: int = 1) -> Evaluable:
        out: Evaluable = self
        for _ in range(order):
            if isinstance(out, Product):
                out = Sum(Product(out.a.radial(), out.b), Product(out.a, out.b.radial()))
            else:
                out = out.radial()
        return out


class VolterraImage:
    """V[h](z) = ∫₀¹ h(tz) dt/t for h with h(0) = 0; R∘V is the identity, so R(V[h]) = h.

    Values come from an open Gauss–Legendre rule on (0,1); radial derivatives are exact.
    """

    def __init__(self, integrand: Evaluable, nodes: int = DEFAULT_NODES, label: str = ""):
        check_nodes(nodes)
        self.integrand = integrand
        self.nodes = nodes
        self.label = label

    @property
    def dim(self) -> int:
        return self.integrand.dim

    def evaluate_at(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, self.dim)
        t, weights = unit_interval_rule(self.nodes)
        scaled = (t[:, None, None] * pts[None, :, :]).reshape(-1, self.dim)
        samples = self.integrand.evaluate_at(scaled).reshape(t.size, pts.shape[0]) / t[:, None]
        if not np.all(np.isfinite(samples)):
            raise ValueError(f"Non-finite integrand sample in {self.label or 'Volterra image'}")
        return weights @ samples

    def radial(self, order: int = 1) -> Evaluable:
        if order < 1:
            raise ValueError(f"Radial derivative order must be positive, got {order}")
        return self.integrand if order == 1 else self.integrand.radial(order - 1)


def image_T(g: Evaluable, f: Evaluable, nodes: int = DEFAULT_NODES) -> VolterraImage:
    """T_g f as a lazy evaluable: V[f·Rg]."""
    return VolterraImage(Product(f, g.radial()), nodes, label="T_g f")


def image_I(g: Evaluable, f: Evaluable, nodes: int = DEFAULT_NODES) -> VolterraImage:
    """I_g f as a lazy evaluable: V[Rf·g]."""
    return VolterraImage(Product(f.radial(), g), nodes, label="I_g f")


def image_M(g: Evaluable, f: Evaluable) -> Product:
    return Product(g, f)


def quadrature_T(g: Evaluable, f: Evaluable, z: BallPoint, nodes: int = DEFAULT_NODES) -> complex:
    """∫₀¹ f(tz)·Rg(tz) dt/t by open Gauss–Legendre quadrature."""
    check_nodes(nodes)
    return complex(image_T(g, f, nodes).evaluate_at(z.coords[None, :])[0])


def quadrature_I(g: Evaluable, f: Evaluable, z: BallPoint, nodes: int = DEFAULT_NODES) -> complex:
    """∫₀¹ Rf(tz)·g(tz) dt/t by open Gauss–Legendre quadrature."""
    check_nodes(nodes)
    return complex(image_I(g, f, nodes).evaluate_at(z.coords[None, :])[0])


def kernel_L(z: BallPoint, w: BallPoint, beta: float, nodes: int = DEFAULT_NODES) -> complex:
    """L(z,w) = ∫₀¹ ((1 − t⟨z,w⟩)^{−(n+1+β)} − 1) dt/t.

    The integrand tends to (n+1+β)⟨z,w⟩ as t → 0; the open rule never samples t = 0.
    """
    check_nodes(nodes)
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if z.dim != w.dim:
        raise ValueError(f"Dimension mismatch: {z.dim} != {w.dim}")
    s = z.pairing(w)
    if not abs(s) < 1.0:
        raise ValueError(f"|<z,w>| = {abs(s)} must be below 1")
    p = z.dim + 1 + beta
    t, weights = unit_interval_rule(nodes)
    samples = ((1.0 - t * s) ** (-p) - 1.0) / t
    if not np.all(np.isfinite(samples)):
        raise ValueError(f"Non-finite kernel sample at <z,w> = {s}")
    return complex(weights @ samples)


def kernel_bound_ratio(z: BallPoint, w: BallPoint, beta: float, nodes: int = DEFAULT_NODES) -> float:
    """|L(z,w)|·|1 − ⟨z,w⟩|^{n+β}, which stays bounded over the ball."""
    s = z.pairing(w)
    return abs(kernel_L(z, w, beta, nodes)) * abs(1.0 - s) ** (z.dim + beta)
