import logging
import math
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Optional, Protocol, Sequence, Union, runtime_checkable

import numpy as np

logger = logging.getLogger(__name__)

TINY = 1e-300
"""Coefficients below this magnitude are dropped on normalization."""

CONSTANT_TOLERANCE = 1e-14
"""Largest constant term accepted by radial_antiderivative."""

# Rows per block when evaluating monomials on a batch of points.
_EVAL_BLOCK = 2048


@runtime_checkable
class Evaluable(Protocol):
    """Anything holomorphic on the ball that can be sampled and radially differentiated.

    Implemented by TruncatedSeries, CompositeRadial and the lazy operator images.
    """

    @property
    def dim(self) -> int: ...

    def evaluate_at(self, points: np.ndarray) -> np.ndarray: ...

    def radial(self, order: int = 1) -> "Evaluable": ...


class MultiIndex(tuple):
    """A multi-index α = (α_1, ..., α_n) of nonnegative integers."""

    def __new__(cls, entries: Iterable[int]):
        values = tuple(int(e) for e in entries)
        if len(values) == 0:
            raise ValueError("MultiIndex needs at least one entry")
        for e in values:
            if e < 0:
                raise ValueError(f"MultiIndex entries must be nonnegative, got {values}")
        return super().__new__(cls, values)

    @property
    def order(self) -> int:
        """Total degree |α|."""
        return sum(self)

    def __add__(self, other):  # type: ignore[override]
        if len(self) != len(other):
            raise ValueError(f"Dimension mismatch: {len(self)} != {len(other)}")
        return MultiIndex(a + b for a, b in zip(self, other))

    def __repr__(self) -> str:
        return f"MultiIndex({tuple(self)})"


class BallPoint:
    """A point z of the open unit ball of C^n."""

    __slots__ = ("_coords",)

    def __init__(self, coords: Union[Sequence[complex], np.ndarray]):
        arr = np.array(coords, dtype=complex).ravel()
        if arr.size == 0:
            raise ValueError("BallPoint needs at least one coordinate")
        norm = float(np.linalg.norm(arr))
        if not norm < 1.0:
            raise ValueError(f"Point {arr} is not in the open unit ball: |z| = {norm}")
        arr.setflags(write=False)
        self._coords = arr

    @classmethod
    def along(cls, radius: float, dim: int, axis: int = 0):
        """The point radius·e_axis."""
        coords = np.zeros(dim, dtype=complex)
        coords[axis] = radius
        return cls(coords)

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def dim(self) -> int:
        return int(self._coords.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self._coords))

    def pairing(self, other: Union["BallPoint", np.ndarray]) -> complex:
        """Hermitian pairing ⟨z,a⟩ = Σ z_j conj(a_j) with z = self."""
        a = other.coords if isinstance(other, BallPoint) else np.asarray(other, dtype=complex)
        return complex(np.vdot(a, self._coords))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BallPoint) and np.array_equal(self._coords, other._coords)

    def __hash__(self) -> int:
        return hash(self._coords.tobytes())

    def __repr__(self) -> str:
        return f"BallPoint({self._coords.tolist()})"


def as_points(points: Union[BallPoint, Sequence[BallPoint], np.ndarray], dim: int) -> np.ndarray:
    """Normalize a point or a batch of points to a complex array of shape (P, dim)."""
    if isinstance(points, BallPoint):
        arr = points.coords[None, :]
    elif isinstance(points, np.ndarray):
        arr = np.atleast_2d(np.asarray(points, dtype=complex))
    else:
        arr = np.array([p.coords for p in points], dtype=complex).reshape(-1, dim)
    if arr.shape[1] != dim:
        raise ValueError(f"Dimension mismatch: points have {arr.shape[1]} coordinates, expected {dim}")
    return arr


class TruncatedSeries:
    """Sparse Taylor expansion in n variables truncated at total degree N.

    Instances are immutable: every operation returns a fresh series.

    Args:
        dim (int): The number of variables n
        cap (int): The degree cap N; no stored multi-index has order above it
        coeffs (Mapping): Multi-index to coefficient table, already normalized
    """

    __slots__ = ("_dim", "_cap", "_coeffs", "_table")

    def __init__(self, dim: int, cap: int, coeffs: Mapping[MultiIndex, complex]):
        self._dim = dim
        self._cap = cap
        self._coeffs = MappingProxyType(dict(coeffs))
        self._table: Optional[tuple[np.ndarray, np.ndarray]] = None

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def cap(self) -> int:
        return self._cap

    @property
    def coeffs(self) -> Mapping[MultiIndex, complex]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Largest stored order, -1 for the zero series."""
        return max((alpha.order for alpha in self._coeffs), default=-1)

    @property
    def constant_term(self) -> complex:
        return self._coeffs.get(MultiIndex((0,) * self._dim), 0j)

    def coefficient(self, alpha: Iterable[int]) -> complex:
        return self._coeffs.get(MultiIndex(alpha), 0j)

    def is_zero(self) -> bool:
        return len(self._coeffs) == 0

    def sorted_terms(self) -> list[tuple[MultiIndex, complex]]:
        """Terms in ascending order, ties broken lexicographically (descending entries)."""
        return sorted(self._coeffs.items(), key=lambda item: (item[0].order, tuple(-e for e in item[0])))

    def with_cap(self, cap: int) -> "TruncatedSeries":
        """Same coefficients under a different cap; terms above a lower cap are dropped."""
        return make_series(self._dim, cap, [(a, c) for a, c in self._coeffs.items() if a.order <= cap])

    def evaluate(self, z: BallPoint) -> complex:
        return evaluate(self, z)

    def evaluate_at(self, points: np.ndarray) -> np.ndarray:
        """Vectorised evaluation at a (P, n) array of points, in ascending-order term sequence."""
        pts = as_points(points, self._dim)
        if self.is_zero():
            return np.zeros(pts.shape[0], dtype=complex)
        exps, coefs = self._monomial_table()
        out = np.empty(pts.shape[0], dtype=complex)
        top = int(exps.max())
        for start in range(0, pts.shape[0], _EVAL_BLOCK):
            block = pts[start : start + _EVAL_BLOCK]
            powers = np.ones(block.shape + (top + 1,), dtype=complex)
            if top > 0:
                powers[:, :, 1:] = np.cumprod(np.repeat(block[:, :, None], top, axis=2), axis=2)
            monomials = np.ones((block.shape[0], exps.shape[0]), dtype=complex)
            for j in range(self._dim):
                monomials *= powers[:, j, exps[:, j]]
            out[start : start + block.shape[0]] = monomials @ coefs
        return out

    def radial(self, order: int = 1) -> "TruncatedSeries":
        s = self
        for _ in range(order):
            s = radial_derivative(s)
        return s

    def _monomial_table(self) -> tuple[np.ndarray, np.ndarray]:
        if self._table is None:
            terms = self.sorted_terms()
            exps = np.array([list(a) for a, _ in terms], dtype=int)
            coefs = np.array([c for _, c in terms], dtype=complex)
            self._table = (exps, coefs)
        return self._table

    def to_dict(self) -> dict:
        """JSON literal: {"kind": "series", "dim": n, "cap": N, "terms": [[[i1, ...], re, im], ...]}."""
        return {
            "kind": "series",
            "dim": self._dim,
            "cap": self._cap,
            "terms": [[list(a), c.real, c.imag] for a, c in self.sorted_terms()],
        }

    @classmethod
    def from_dict(cls, spec: dict) -> "TruncatedSeries":
        """Parse the series JSON literal."""
        if spec.get("kind", "series") != "series":
            raise ValueError(f'Expected kind "series", got {spec.get("kind")!r}')
        try:
            dim = int(spec["dim"])
            cap = int(spec["cap"])
            raw_terms = spec["terms"]
        except KeyError as e:
            raise ValueError(f"Series literal is missing field {e}") from e
        terms = []
        for raw in raw_terms:
            if not isinstance(raw, (list, tuple)) or len(raw) not in (2, 3):
                raise ValueError(f"Malformed series term {raw!r}")
            im = raw[2] if len(raw) == 3 else 0.0
            terms.append((MultiIndex(raw[0]), complex(raw[1], im)))
        return make_series(dim, cap, terms)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, other)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, scale(other, -1.0))

    def __neg__(self) -> "TruncatedSeries":
        return scale(self, -1.0)

    def __mul__(self, other: Any) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return multiply(self, other)
        return scale(self, complex(other))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TruncatedSeries)
            and self._dim == other._dim
            and self._cap == other._cap
            and dict(self._coeffs) == dict(other._coeffs)
        )

    def __hash__(self) -> int:
        return hash((self._dim, self._cap, frozenset(self._coeffs.items())))

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})*z^{tuple(a)}" for a, c in self.sorted_terms()) or "0"
        return f"TruncatedSeries(dim={self._dim}, cap={self._cap}: {body})"


def make_series(n: int, N: int, terms: Iterable[tuple[Iterable[int], complex]]) -> TruncatedSeries:
    """Build a normalized series: duplicate indices are summed and zeros dropped.

    Raises:
        ValueError: on a dimension mismatch or an index whose order exceeds the cap
    """
    if n < 1:
        raise ValueError(f"Dimension must be at least 1, got {n}")
    if N < 0:
        raise ValueError(f"Degree cap must be nonnegative, got {N}")
    acc: dict[MultiIndex, complex] = {}
    for raw, c in terms:
        alpha = raw if isinstance(raw, MultiIndex) else MultiIndex(raw)
        if len(alpha) != n:
            raise ValueError(f"Dimension mismatch: index {tuple(alpha)} has length {len(alpha)}, expected {n}")
        if alpha.order > N:
            raise ValueError(f"Index {tuple(alpha)} has order {alpha.order} which exceeds cap {N}")
        acc[alpha] = acc.get(alpha, 0j) + complex(c)
    return TruncatedSeries(n, N, {a: c for a, c in acc.items() if abs(c) >= TINY})


def _check_same_dim(a: TruncatedSeries, b: TruncatedSeries):
    if a.dim != b.dim:
        raise ValueError(f"Dimension mismatch: {a.dim} != {b.dim}")


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_same_dim(a, b)
    cap = min(a.cap, b.cap)
    terms = [(k, v) for k, v in a.coeffs.items() if k.order <= cap]
    terms += [(k, v) for k, v in b.coeffs.items() if k.order <= cap]
    return make_series(a.dim, cap, terms)


def scale(a: TruncatedSeries, c: complex) -> TruncatedSeries:
    return make_series(a.dim, a.cap, [(k, c * v) for k, v in a.coeffs.items()])


def multiply(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Truncated product: coefficient convolution, terms above min(cap) discarded."""
    _check_same_dim(a, b)
    cap = min(a.cap, b.cap)
    acc: dict[MultiIndex, complex] = {}
    for ka, va in a.coeffs.items():
        if ka.order > cap:
            continue
        for kb, vb in b.coeffs.items():
            if ka.order + kb.order > cap:
                continue
            k = ka + kb
            acc[k] = acc.get(k, 0j) + va * vb
    return make_series(a.dim, cap, acc.items())


def evaluate(s: TruncatedSeries, z: BallPoint) -> complex:
    """Σ a_α z^α, summed in ascending |α| with compensated (fsum) real and imaginary parts."""
    if z.dim != s.dim:
        raise ValueError(f"Dimension mismatch: point has {z.dim} coordinates, series has {s.dim} variables")
    re: list[float] = []
    im: list[float] = []
    coords = z.coords
    for alpha, c in s.sorted_terms():
        term = c
        for zj, e in zip(coords, alpha):
            if e:
                term *= complex(zj) ** e
        re.append(term.real)
        im.append(term.imag)
    return complex(math.fsum(re), math.fsum(im))


def radial_derivative(s: TruncatedSeries) -> TruncatedSeries:
    """R: a_α -> |α|·a_α."""
    return make_series(s.dim, s.cap, [(k, k.order * v) for k, v in s.coeffs.items() if k.order > 0])


def radial_antiderivative(s: TruncatedSeries) -> TruncatedSeries:
    """R^{-1}: a_α -> a_α/|α|, defined only when the constant term vanishes.

    Raises:
        ValueError: if |s(0)| exceeds CONSTANT_TOLERANCE
    """
    c0 = s.constant_term
    if abs(c0) > CONSTANT_TOLERANCE:
        raise ValueError(f"Radial antiderivative is undefined for a nonzero constant term {c0}")
    return make_series(s.dim, s.cap, [(k, v / k.order) for k, v in s.coeffs.items() if k.order > 0])


def max_coefficient_distance(a: TruncatedSeries, b: TruncatedSeries) -> float:
    """max_α |a_α − b_α| over the union of stored indices."""
    _check_same_dim(a, b)
    keys = set(a.coeffs) | set(b.coeffs)
    return max((abs(a.coeffs.get(k, 0j) - b.coeffs.get(k, 0j)) for k in keys), default=0.0)


def monomial(n: int, N: int, alpha: Iterable[int], c: complex = 1.0) -> TruncatedSeries:
    return make_series(n, N, [(MultiIndex(alpha), c)])


def constant(n: int, N: int, c: complex = 1.0) -> TruncatedSeries:
    return make_series(n, N, [(MultiIndex((0,) * n), c)])


def linear_form(a: Union[BallPoint, np.ndarray], N: int) -> TruncatedSeries:
    """The series of w = ⟨z,a⟩ = Σ z_j conj(a_j)."""
    coords = a.coords if isinstance(a, BallPoint) else np.asarray(a, dtype=complex).ravel()
    n = coords.size
    terms = []
    for j, aj in enumerate(coords):
        e = [0] * n
        e[j] = 1
        terms.append((MultiIndex(e), complex(np.conj(aj))))
    return make_series(n, N, terms)


def from_univariate(coeffs: Sequence[complex], N: Optional[int] = None) -> TruncatedSeries:
    """One-variable series Σ c_k z^k, truncated at N (default len(coeffs) - 1)."""
    N = len(coeffs) - 1 if N is None else N
    return make_series(1, max(N, 0), [((k,), c) for k, c in enumerate(coeffs) if k <= N])


def multi_indices(n: int, max_order: int) -> list[MultiIndex]:
    """All length-n multi-indices with order ≤ max_order, in ascending order."""
    out: list[MultiIndex] = []

    def rec(prefix: list[int], remaining: int):
        if len(prefix) == n - 1:
            for last in range(remaining + 1):
                out.append(MultiIndex(prefix + [last]))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e)

    rec([], max_order)
    out.sort(key=lambda a: (a.order, tuple(-e for e in a)))
    return out


def random_polynomial(
    n: int,
    degree: int,
    cap: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    seed: int = 0,
) -> TruncatedSeries:
    """Dense polynomial of total degree ≤ degree with standard complex Gaussian coefficients."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    cap = degree if cap is None else cap
    indices = multi_indices(n, degree)
    values = rng.standard_normal((len(indices), 2))
    return make_series(n, cap, [(a, complex(re, im)) for a, (re, im) in zip(indices, values)])
