"""The spin factor JSpin_d = R^d (+) R.

Elements are pairs ``(v, s)`` with the Jordan product

    (v, s) . (w, t) = (t v + s w, <v, w> + s t)

and trace ``tr(v, s) = 2 s``.  The positive cone is ``||v|| <= s``; the state
space is the ball ``s = 1/2, ||v|| <= 1/2`` whose centre is ``(0, 1/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, DomainError, NotAStateError, SingularStateError

#: positivity slack: ``||v|| <= s + EPS_POS`` still counts as positive
EPS_POS = 1e-12
#: below this norm of ``v`` the spectrum is treated as degenerate
EPS_DEG = 1e-14


@dataclass(frozen=True, eq=False)
class SpinElement:
    """An element ``(v, s)`` of JSpin_d.  ``v`` is stored as a read-only copy."""

    v: np.ndarray
    s: float

    def __post_init__(self):
        v = np.array(self.v, dtype=float).reshape(-1)
        if v.size < 1:
            raise ValueError("spin factor dimension must be at least 1")
        v.flags.writeable = False
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "s", float(self.s))

    @property
    def d(self) -> int:
        return self.v.size

    def trace(self) -> float:
        return 2.0 * self.s

    def norm_v(self) -> float:
        return float(np.linalg.norm(self.v))

    def _check(self, other: "SpinElement"):
        if not isinstance(other, SpinElement):
            return NotImplemented
        if other.d != self.d:
            raise DimensionMismatchError(f"dimension mismatch: {self.d} vs {other.d}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SpinElement(self.v + other.v, self.s + other.s)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SpinElement(self.v - other.v, self.s - other.s)

    def __neg__(self):
        return SpinElement(-self.v, -self.s)

    def __mul__(self, scalar):
        if isinstance(scalar, SpinElement):
            return NotImplemented
        scalar = float(scalar)
        return SpinElement(scalar * self.v, scalar * self.s)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def allclose(self, other: "SpinElement", atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.all(np.abs(self.v - other.v) <= atol) and abs(self.s - other.s) <= atol)

    def max_abs_diff(self, other: "SpinElement") -> float:
        self._check(other)
        return float(max(np.max(np.abs(self.v - other.v)), abs(self.s - other.s)))

    def to_json(self) -> dict:
        return {"d": self.d, "v": [float(a) for a in self.v], "s": self.s}

    @classmethod
    def from_json(cls, data: dict) -> "SpinElement":
        v = data["v"]
        if "d" in data and int(data["d"]) != len(v):
            raise ValueError(f"declared d={data['d']} but v has {len(v)} entries")
        return cls(v, data["s"])

    # state predicates -------------------------------------------------

    def is_positive(self, eps: float = EPS_POS) -> bool:
        return self.norm_v() <= self.s + eps

    def is_state(self, eps: float = EPS_POS) -> bool:
        return abs(self.s - 0.5) <= eps and self.norm_v() <= 0.5 + eps

    def is_pure(self, eps: float = EPS_POS) -> bool:
        return self.is_state(eps) and abs(self.norm_v() - 0.5) <= eps

    def is_center(self, eps: float = EPS_POS) -> bool:
        return self.is_state(eps) and self.norm_v() <= eps

    def __repr__(self):
        return f"SpinElement(v={self.v.tolist()}, s={self.s!r})"


# ---------------------------------------------------------------------------
# constructors


def unit(d: int) -> SpinElement:
    """The unit ``(0, 1)``."""
    return SpinElement(np.zeros(d), 1.0)


def zero(d: int) -> SpinElement:
    return SpinElement(np.zeros(d), 0.0)


def center(d: int) -> SpinElement:
    """The maximally mixed state ``(0, 1/2)``."""
    return SpinElement(np.zeros(d), 0.5)


def state(v) -> SpinElement:
    """The trace-one element with vector part ``v``; raises if it is not positive."""
    x = SpinElement(v, 0.5)
    if not x.is_state():
        raise NotAStateError(f"||v|| = {x.norm_v()!r} exceeds 1/2")
    return x


def pure_state(direction) -> SpinElement:
    """The pure state pointing along ``direction`` (normalised)."""
    u = np.asarray(direction, dtype=float)
    n = np.linalg.norm(u)
    if n == 0:
        raise ValueError("direction must be non-zero")
    return SpinElement(0.5 * u / n, 0.5)


def basis_vector(d: int, k: int) -> np.ndarray:
    e = np.zeros(d)
    e[k] = 1.0
    return e


def as_state(x: SpinElement, eps: float = EPS_POS) -> SpinElement:
    if not isinstance(x, SpinElement):
        raise TypeError(f"expected SpinElement, got {type(x).__name__}")
    if not x.is_state(eps):
        raise NotAStateError(f"not a state: s={x.s!r}, ||v||={x.norm_v()!r}")
    return x


def random_state(rng: np.random.Generator, d: int, max_radius: float = 0.5) -> SpinElement:
    """A state drawn uniformly from the ball of radius ``max_radius`` around the centre."""
    g = rng.standard_normal(d)
    g /= np.linalg.norm(g)
    r = max_radius * rng.random() ** (1.0 / d)
    return SpinElement(r * g, 0.5)


def random_boundary_state(rng: np.random.Generator, d: int, depth: float = 8.0) -> SpinElement:
    """A state at distance ``10^(-depth U) / 2`` from the boundary, ``U`` uniform."""
    g = rng.standard_normal(d)
    g /= np.linalg.norm(g)
    r = 0.5 - 0.5 * 10.0 ** (-depth * rng.random())
    return SpinElement(r * g, 0.5)


def random_pure_state(rng: np.random.Generator, d: int) -> SpinElement:
    return pure_state(rng.standard_normal(d))


def random_element(rng: np.random.Generator, d: int, scale: float = 1.0) -> SpinElement:
    return SpinElement(scale * rng.standard_normal(d), scale * rng.standard_normal())


# ---------------------------------------------------------------------------
# product, trace form, spectral calculus


def _same_d(x: SpinElement, y: SpinElement):
    if x.d != y.d:
        raise DimensionMismatchError(f"dimension mismatch: {x.d} vs {y.d}")


def bullet(x: SpinElement, y: SpinElement) -> SpinElement:
    """Jordan product ``(t v + s w, <v, w> + s t)``."""
    _same_d(x, y)
    return SpinElement(y.s * x.v + x.s * y.v, float(x.v @ y.v) + x.s * y.s)


def trace_inner(x: SpinElement, y: SpinElement) -> float:
    """``tr[x . y] = 2 (<v, w> + s t)``."""
    _same_d(x, y)
    return 2.0 * (float(x.v @ y.v) + x.s * y.s)


@dataclass(frozen=True)
class SpectralDecomposition:
    lambda_minus: float
    lambda_plus: float
    sigma_minus: SpinElement
    sigma_plus: SpinElement

    def reconstruct(self) -> SpinElement:
        return self.lambda_minus * self.sigma_minus + self.lambda_plus * self.sigma_plus


def _axis(x: SpinElement, eps_deg: float, axis) -> tuple[np.ndarray, float]:
    r = x.norm_v()
    if r < eps_deg:
        u = basis_vector(x.d, 0) if axis is None else np.asarray(axis, float) / np.linalg.norm(axis)
        return u, r
    return x.v / r, r


def eigenvalues(x: SpinElement) -> tuple[float, float]:
    r = x.norm_v()
    return x.s - r, x.s + r


def spectral_decompose(x: SpinElement, eps_deg: float = EPS_DEG, axis=None) -> SpectralDecomposition:
    """Eigenvalues ``s -/+ ||v||`` with the orthogonal pure idempotents ``(-/+ v/2||v||, 1/2)``.

    Below ``eps_deg`` the direction is arbitrary; ``axis`` (default ``e_1``)
    picks it.
    """
    u, r = _axis(x, eps_deg, axis)
    return SpectralDecomposition(
        lambda_minus=x.s - r,
        lambda_plus=x.s + r,
        sigma_minus=SpinElement(-0.5 * u, 0.5),
        sigma_plus=SpinElement(0.5 * u, 0.5),
    )


def _eval(f: Callable, lam: float) -> float:
    try:
        with np.errstate(all="ignore"):
            val = float(f(lam))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(f"function undefined at eigenvalue {lam!r}: {exc}", eigenvalue=lam) from exc
    if not math.isfinite(val):
        raise DomainError(f"function undefined at eigenvalue {lam!r} (got {val})", eigenvalue=lam)
    return val


def apply_function(f: Callable, x: SpinElement, eps_deg: float = EPS_DEG, axis=None) -> SpinElement:
    """``f(x) = f(lambda_-) sigma_- + f(lambda_+) sigma_+``."""
    u, r = _axis(x, eps_deg, axis)
    fm = _eval(f, x.s - r)
    fp = _eval(f, x.s + r)
    return SpinElement(0.5 * (fp - fm) * u, 0.5 * (fp + fm))


def quadratic_rep(a: SpinElement, x: SpinElement) -> SpinElement:
    """``U_a(x) = 2 a.(a.x) - (a.a).x``; the sandwich ``a x a`` of a matrix algebra."""
    _same_d(a, x)
    return 2.0 * bullet(a, bullet(a, x)) - bullet(bullet(a, a), x)


def _require_invertible(x: SpinElement, eps: float, what: str):
    lo, _ = eigenvalues(x)
    if lo <= eps:
        raise SingularStateError(f"{what}: eigenvalue {lo!r} <= {eps!r}", eigenvalue=lo)


def sqrt_element(x: SpinElement, eps: float = EPS_POS) -> SpinElement:
    lo, _ = eigenvalues(x)
    if lo < -eps:
        raise DomainError(f"square root of a non-positive element: eigenvalue {lo!r}", eigenvalue=lo)
    return apply_function(lambda t: math.sqrt(max(t, 0.0)), x)


def inverse_element(x: SpinElement, eps: float = EPS_POS) -> SpinElement:
    _require_invertible(x, eps, "inverse")
    return apply_function(lambda t: 1.0 / t, x)


def inv_sqrt_element(x: SpinElement, eps: float = EPS_POS) -> SpinElement:
    _require_invertible(x, eps, "inverse square root")
    return apply_function(lambda t: 1.0 / math.sqrt(t), x)
