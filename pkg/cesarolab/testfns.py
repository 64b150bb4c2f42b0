import logging
import math
import warnings
from enum import Enum
from functools import lru_cache
from threading import Lock
from typing import Callable, Optional, Sequence, Union

import numpy as np
import sympy

from cesarolab.quadrature import DEFAULT_NODES, integrate_unit
from cesarolab.series import BallPoint, TruncatedSeries, as_points, constant, linear_form

logger = logging.getLogger(__name__)

THRESHOLD_RADIUS = math.sqrt(1.0 - 2.0 / math.e)
"""Smallest |a| for which the h_a, f_a, f_k norm bounds are stated."""

_w, _lam, _mu = sympy.symbols("w lam mu")
_L = sympy.log(2 / (1 - _w))
_compile_lock = Lock()


class ProfileKind(Enum):
    """ProfileKind tags the one-variable profile φ of a composite φ(⟨z,a⟩).

    LOG_KERNEL: log(2/(1−w)).
    HA: (w−1)[(1+log(2/(1−w)))²+1] / log(2/(1−|a|²)).
    FA: h_a minus ∫₀¹ w·log(2/(1−tw)) dt.
    FK: h_{z_k} minus log(2/(1−|z_k|²))⁻² ∫₀¹ w·log(2/(1−tw))³ dt.
    CUSTOM: a polynomial Σ c_k w^k."""

    LOG_KERNEL = "log_kernel"
    HA = "h_a"
    FA = "f_a"
    FK = "f_k"
    CUSTOM = "custom"


def _log_power_antiderivative(m: int) -> sympy.Expr:
    """∫₀^w log(2/(1−s))^m ds = P_m(log 2) − (1−w)·P_m(L(w)), P_m(x) = Σ_j m!/j! x^j."""

    def p(x):
        return sum(sympy.factorial(m) / sympy.factorial(j) * x**j for j in range(m + 1))

    return p(sympy.log(2)) - (1 - _w) * p(_L)


def _base_expr(kind: ProfileKind) -> sympy.Expr:
    h = (_w - 1) * ((1 + _L) ** 2 + 1) / _lam
    if kind == ProfileKind.LOG_KERNEL:
        return _L
    if kind == ProfileKind.HA:
        return h
    if kind == ProfileKind.FA:
        return h - _log_power_antiderivative(1)
    if kind == ProfileKind.FK:
        return h - _log_power_antiderivative(3) / _mu**2
    raise ValueError(f"Profile {kind} has no symbolic form")


@lru_cache(maxsize=None)
def profile_expr(kind: ProfileKind, order: int = 0) -> sympy.Expr:
    """Symbolic θ^order φ with θ = w d/dw, the profile of R^order of the composite."""
    if order == 0:
        return _base_expr(kind)
    return _w * sympy.diff(profile_expr(kind, order - 1), _w)


@lru_cache(maxsize=None)
def _profile_fn(kind: ProfileKind, order: int) -> Callable:
    with _compile_lock:
        logger.debug(f"Compiling profile {kind.value} of radial order {order}")
        return sympy.lambdify((_w, _lam, _mu), profile_expr(kind, order), modules="numpy")


def log_power_integral(w: Union[complex, np.ndarray], m: int) -> np.ndarray:
    """Closed form of ∫₀^w log(2/(1−s))^m ds = ∫₀¹ w·log(2/(1−tw))^m dt."""
    w = np.asarray(w, dtype=complex)
    log_w = np.log(2.0 / (1.0 - w))
    p_log2 = sum(math.factorial(m) / math.factorial(j) * math.log(2.0) ** j for j in range(m + 1))
    p_w = sum(math.factorial(m) / math.factorial(j) * log_w**j for j in range(m + 1))
    return p_log2 - (1.0 - w) * p_w


def defining_integral(w: Union[complex, np.ndarray], m: int, nodes: int = DEFAULT_NODES) -> np.ndarray:
    """∫₀¹ w·log(2/(1−tw))^m dt by Gauss–Legendre quadrature."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))

    def integrand(t: np.ndarray) -> np.ndarray:
        tw = t[:, None] * w[None, :]
        return w[None, :] * np.log(2.0 / (1.0 - tw)) ** m

    return integrate_unit(integrand, nodes)


def log_factor(radius_squared: float) -> float:
    """log(2/(1−s)) for s = |a|²."""
    return math.log(2.0 / (1.0 - radius_squared))


class CompositeRadial:
    """A function φ(⟨z,a⟩) of one complex variable w = ⟨z,a⟩ anchored at a.

    Radial derivatives are exact: R[φ(⟨z,a⟩)] = (θφ)(⟨z,a⟩) with θ = w d/dw, so a radial
    derivative of order m is the same composite with profile θ^m φ.

    Args:
        anchor: The anchor a, |a| ≤ 1
        kind (ProfileKind): The profile family
        lam (float): The log(2/(1−|a|²)) normalisation of h-type profiles
        mu (float): The f_k prefactor log factor
        coeffs: Polynomial coefficients for ProfileKind.CUSTOM
        order (int): Radial derivatives already applied
        label (str): Display name
    """

    def __init__(
        self,
        anchor: Union[BallPoint, Sequence[complex], np.ndarray],
        kind: ProfileKind,
        /,
        lam: float = 1.0,
        mu: float = 1.0,
        coeffs: Optional[Sequence[complex]] = None,
        order: int = 0,
        label: str = "",
    ):
        a = anchor.coords if isinstance(anchor, BallPoint) else np.array(anchor, dtype=complex).ravel()
        if a.size == 0:
            raise ValueError("Anchor needs at least one coordinate")
        if float(np.linalg.norm(a)) > 1.0 + 1e-15:
            raise ValueError(f"Anchor {a} lies outside the closed unit ball")
        if kind == ProfileKind.CUSTOM and coeffs is None:
            raise ValueError("Custom profile needs coefficients")
        a = a.copy()
        a.setflags(write=False)
        self._anchor = a
        self.kind = kind
        self.lam = float(lam)
        self.mu = float(mu)
        self._coeffs = None if coeffs is None else np.array(coeffs, dtype=complex)
        self.order = order
        self.label = label if label else kind.value

    @property
    def anchor(self) -> np.ndarray:
        return self._anchor

    @property
    def dim(self) -> int:
        return int(self._anchor.size)

    def pairing(self, points: np.ndarray) -> np.ndarray:
        """w = ⟨z,a⟩ for each row z of points."""
        pts = as_points(points, self.dim)
        return pts @ np.conj(self._anchor)

    def profile(self, w: Union[complex, np.ndarray]) -> np.ndarray:
        """(θ^order φ)(w)."""
        w = np.asarray(w, dtype=complex)
        if self.kind == ProfileKind.CUSTOM:
            assert self._coeffs is not None
            k = np.arange(self._coeffs.size)
            return np.polynomial.polynomial.polyval(w, self._coeffs * k.astype(float) ** self.order)
        value = _profile_fn(self.kind, self.order)(w, self.lam, self.mu)
        return np.broadcast_to(np.asarray(value, dtype=complex), w.shape).copy()

    def evaluate_at(self, points: np.ndarray) -> np.ndarray:
        w = self.pairing(points)
        if np.any(1.0 - w.real <= 0.0):
            raise ValueError(f"Branch safety violated for {self.label}: Re(1 − ⟨z,a⟩) ≤ 0")
        return self.profile(w)

    def evaluate(self, z: BallPoint) -> complex:
        return complex(self.evaluate_at(z.coords[None, :])[0])

    def radial(self, order: int = 1) -> "CompositeRadial":
        return composite_radial_derivative(self, order)

    def derived(self, order: int) -> "CompositeRadial":
        """Copy of this composite with `order` further radial derivatives applied."""
        suffix = "R" * order
        return CompositeRadial(
            self._anchor,
            self.kind,
            lam=self.lam,
            mu=self.mu,
            coeffs=self._coeffs,
            order=self.order + order,
            label=f"{suffix}{self.label}",
        )

    def to_dict(self) -> dict:
        """Function-spec JSON: {"kind": ..., "a": [[re, im], ...]}."""
        spec: dict = {"kind": self.kind.value, "a": [[c.real, c.imag] for c in self._anchor]}
        if float(np.linalg.norm(self._anchor)) >= 1.0:
            spec["closed"] = True
        if self.kind == ProfileKind.CUSTOM:
            assert self._coeffs is not None
            spec["coeffs"] = [[c.real, c.imag] for c in self._coeffs]
        if self.kind == ProfileKind.FK and not math.isclose(self.mu, self.lam):
            spec["literal"] = True
        if self.order:
            spec["radial_order"] = self.order
        return spec

    def __repr__(self) -> str:
        return f"CompositeRadial({self.label}, a={self._anchor.tolist()})"


def composite_radial_derivative(F: CompositeRadial, order: int = 1) -> CompositeRadial:
    """R^order of a composite: order 1 gives profile w·φ′(w), order 2 gives w·φ′(w) + w²·φ″(w)."""
    if order < 1:
        raise ValueError(f"Radial derivative order must be positive, got {order}")
    return F.derived(order)


def threshold_radius() -> float:
    return THRESHOLD_RADIUS


def _anchor_coords(a: Union[BallPoint, Sequence[complex], np.ndarray], closed: bool = False) -> np.ndarray:
    if isinstance(a, BallPoint):
        return a.coords
    coords = np.array(a, dtype=complex).ravel()
    if not closed:
        # Validates |a| < 1
        BallPoint(coords)
    return coords


def _warn_below_threshold(name: str, a: np.ndarray):
    r = float(np.linalg.norm(a))
    if r < THRESHOLD_RADIUS:
        warnings.warn(
            f"{name}: |a| = {r:.6g} is below sqrt(1 - 2/e) = {THRESHOLD_RADIUS:.6g}; norm bounds are not asserted",
            RuntimeWarning,
            stacklevel=3,
        )


def log_kernel(a: Union[BallPoint, Sequence[complex], np.ndarray], closed: bool = False) -> CompositeRadial:
    """log(2/(1−⟨z,a⟩)), principal branch.

    With closed=True the anchor may lie on the unit sphere, e.g. g(z) = log(2/(1−⟨z,e₁⟩)).
    """
    coords = _anchor_coords(a, closed)
    return CompositeRadial(coords, ProfileKind.LOG_KERNEL, label="log_kernel")


def h_a(a: Union[BallPoint, Sequence[complex], np.ndarray]) -> CompositeRadial:
    coords = _anchor_coords(a)
    _warn_below_threshold("h_a", coords)
    lam = log_factor(float(np.vdot(coords, coords).real))
    return CompositeRadial(coords, ProfileKind.HA, lam=lam, label="h_a")


def f_a(a: Union[BallPoint, Sequence[complex], np.ndarray]) -> CompositeRadial:
    coords = _anchor_coords(a)
    _warn_below_threshold("f_a", coords)
    lam = log_factor(float(np.vdot(coords, coords).real))
    return CompositeRadial(coords, ProfileKind.FA, lam=lam, label="f_a")


def f_k(zk: Union[BallPoint, Sequence[complex], np.ndarray], literal_prefactor: bool = False) -> CompositeRadial:
    """h_{z_k} − c·∫₀¹ ⟨z,z_k⟩ log(2/(1−t⟨z,z_k⟩))³ dt.

    The default prefactor is c = log(2/(1−|z_k|²))⁻², which makes Rf_k(z_k) = 0.
    literal_prefactor=True uses log(2/(1−|z_k|))⁻² instead.
    """
    coords = _anchor_coords(zk)
    _warn_below_threshold("f_k", coords)
    s = float(np.vdot(coords, coords).real)
    lam = log_factor(s)
    mu = math.log(2.0 / (1.0 - math.sqrt(s))) if literal_prefactor else lam
    return CompositeRadial(coords, ProfileKind.FK, lam=lam, mu=mu, label="f_k")


def custom(
    a: Union[BallPoint, Sequence[complex], np.ndarray], coeffs: Sequence[complex], closed: bool = False
) -> CompositeRadial:
    """Polynomial profile Σ c_k ⟨z,a⟩^k."""
    return CompositeRadial(_anchor_coords(a, closed), ProfileKind.CUSTOM, coeffs=coeffs, label="custom")


def _truncated_product(p: np.ndarray, q: np.ndarray, cap: int) -> np.ndarray:
    return np.convolve(p, q)[: cap + 1]


def _integrated(p: np.ndarray, cap: int) -> np.ndarray:
    """Coefficients of ∫₀^w p(s) ds."""
    out = np.zeros(cap + 1, dtype=complex)
    k = np.arange(1, min(cap, p.size) + 1)
    out[k] = p[k - 1] / k
    return out


def taylor_coefficients(F: CompositeRadial, cap: int) -> np.ndarray:
    """Taylor coefficients c_0..c_cap of the profile θ^order φ around w = 0."""
    k = np.arange(cap + 1)
    log_series = np.zeros(cap + 1, dtype=complex)
    log_series[0] = math.log(2.0)
    log_series[1:] = 1.0 / k[1:]
    if F.kind == ProfileKind.LOG_KERNEL:
        base = log_series
    elif F.kind == ProfileKind.CUSTOM:
        base = np.zeros(cap + 1, dtype=complex)
        assert F._coeffs is not None
        n = min(cap + 1, F._coeffs.size)
        base[:n] = F._coeffs[:n]
    else:
        one_plus = log_series.copy()
        one_plus[0] += 1.0
        bracket = _truncated_product(one_plus, one_plus, cap)
        bracket[0] += 1.0
        w_minus_one = np.array([-1.0, 1.0], dtype=complex)
        base = _truncated_product(w_minus_one, bracket, cap) / F.lam
        base = np.pad(base, (0, cap + 1 - base.size))
        if F.kind == ProfileKind.FA:
            base = base - _integrated(log_series, cap)
        elif F.kind == ProfileKind.FK:
            cube = _truncated_product(_truncated_product(log_series, log_series, cap), log_series, cap)
            base = base - _integrated(cube, cap) / F.mu**2
    return base * k.astype(float) ** F.order


def expand(F: CompositeRadial, cap: int) -> TruncatedSeries:
    """The n-variable truncated series of a composite: Horner's scheme in ⟨z,a⟩."""
    c = taylor_coefficients(F, cap)
    w = linear_form(F.anchor, cap)
    s = constant(F.dim, cap, c[cap])
    for k in range(cap - 1, -1, -1):
        s = s * w + constant(F.dim, cap, c[k])
    logger.debug(f"Expanded {F.label} to {len(s.coeffs)} terms at cap {cap}")
    return s
