"""Affinities of the state ball (channels) and maps built from them.

Coordinates put the centre at the origin and pure states at radius 1/2, so a
channel is a pair ``(A, c)`` acting on the whole algebra by

    Phi(v, s) = (A v + s c, s),

which preserves the trace by construction.  It is convenient to carry the
homogeneous ``(d+1) x (d+1)`` matrix ``[[A, c], [0, 1]]`` acting on ``(v, s)``:
composition and power series of channels become matrix arithmetic on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, stats

from .algebra import (
    EPS_POS,
    SpinElement,
    as_state,
    bullet,
    eigenvalues,
    inv_sqrt_element,
    quadratic_rep,
    sqrt_element,
)
from .errors import ConvergenceError, DimensionMismatchError


@dataclass(frozen=True, eq=False)
class Channel:
    A: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        c = np.array(self.c, dtype=float).reshape(-1)
        if A.ndim == 0:
            A = A.reshape(1, 1)
        if A.shape != (c.size, c.size):
            raise DimensionMismatchError(f"A has shape {A.shape} but c has {c.size} entries")
        A.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)

    @property
    def d(self) -> int:
        return self.c.size

    @classmethod
    def identity(cls, d: int) -> "Channel":
        return cls(np.eye(d), np.zeros(d))

    @classmethod
    def from_homogeneous(cls, m: np.ndarray) -> "Channel":
        return cls(m[:-1, :-1], m[:-1, -1])

    def homogeneous(self) -> np.ndarray:
        d = self.d
        m = np.zeros((d + 1, d + 1))
        m[:d, :d] = self.A
        m[:d, d] = self.c
        m[d, d] = 1.0
        return m

    def __call__(self, x: SpinElement) -> SpinElement:
        return apply(self, x)

    def then(self, other: "Channel") -> "Channel":
        """``other o self``."""
        return compose(other, self)

    def distance(self, other: "Channel") -> float:
        return float(max(np.max(np.abs(self.A - other.A)), np.max(np.abs(self.c - other.c))))

    def to_json(self) -> dict:
        return {"d": self.d, "A": self.A.tolist(), "c": self.c.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "Channel":
        ch = cls(data["A"], data["c"])
        if "d" in data and int(data["d"]) != ch.d:
            raise ValueError(f"declared d={data['d']} but c has {ch.d} entries")
        return ch


def apply(phi: Channel, x: SpinElement) -> SpinElement:
    if phi.d != x.d:
        raise DimensionMismatchError(f"channel on JSpin_{phi.d} applied to element of JSpin_{x.d}")
    return SpinElement(phi.A @ x.v + x.s * phi.c, x.s)


def compose(outer: Channel, inner: Channel) -> Channel:
    """``outer o inner``."""
    if outer.d != inner.d:
        raise DimensionMismatchError(f"cannot compose channels on d={outer.d} and d={inner.d}")
    return Channel(outer.A @ inner.A, outer.A @ inner.c + outer.c)


# ---------------------------------------------------------------------------
# validity


@dataclass(frozen=True)
class ValidityCertificate:
    valid: bool
    max_norm: float  # sup over the unit ball of ||A u + c||
    u: np.ndarray  # a maximiser, ||u|| = 1

    def __bool__(self):
        return self.valid


def max_norm_on_ball(A: np.ndarray, c: np.ndarray) -> tuple[float, np.ndarray]:
    """Maximise ``||A u + c||`` over ``||u|| <= 1``.

    The maximum of a convex function sits on the sphere.  Stationarity gives
    ``(nu I - A^T A) u = A^T c`` and the global maximiser is the solution with
    ``nu >= lambda_max(A^T A)``; in the eigenbasis of ``A^T A`` this is a scalar
    secular equation ``||u(nu)|| = 1``, monotone for ``nu > lambda_max``.
    """
    A = np.asarray(A, float)
    c = np.asarray(c, float)
    d = c.size
    mu, Q = np.linalg.eigh(A.T @ A)
    b = Q.T @ (A.T @ c)
    mu_max = mu[-1]
    scale = max(mu_max, float(b @ b) ** 0.5, 1.0)
    top = np.abs(mu - mu_max) <= 1e-12 * scale
    b_top = np.linalg.norm(b[top])

    def objective(u):
        return float(np.linalg.norm(A @ u + c))

    if np.linalg.norm(b) <= 1e-15 * scale:
        # no linear term: the top eigenvector of A^T A is a maximiser
        u = Q[:, -1] if mu_max > 0 else np.eye(d)[0]
        return objective(u), u

    def norm_u(nu, mask):
        return float(np.linalg.norm(b[mask] / (nu - mu[mask])))

    mask = np.ones(d, dtype=bool)
    lo = mu_max + b_top  # norm_u(lo) >= b_top / (lo - mu_max) = 1
    if b_top <= 1e-13 * scale:
        # hard case: no pull along the top eigenspace
        mask = ~top
        p = np.zeros(d)
        p[mask] = b[mask] / (mu_max - mu[mask])
        pn = np.linalg.norm(p)
        if pn <= 1.0:
            p[np.flatnonzero(top)[0]] = np.sqrt(max(0.0, 1.0 - pn * pn))
            u = Q @ p
            return objective(u), u
        lo = mu_max  # norm_u(lo) = pn > 1
    hi = mu_max + np.linalg.norm(b)  # nu - mu_i >= ||b||, so norm_u(hi) <= 1
    if lo >= hi:
        nu = hi
    else:
        nu = optimize.brentq(lambda t: norm_u(t, mask) - 1.0, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    w = np.zeros(d)
    w[mask] = b[mask] / (nu - mu[mask])
    u = Q @ w
    u /= np.linalg.norm(u)
    return objective(u), u


def is_valid(phi: Channel, eps: float = EPS_POS) -> ValidityCertificate:
    """Decide whether ``phi`` maps the state ball into itself.

    In unit-ball coordinates ``u = 2 v`` the condition is ``||A u + c|| <= 1``
    for all ``||u|| <= 1``; the slack is ``2 eps``.
    """
    m, u = max_norm_on_ball(phi.A, phi.c)
    return ValidityCertificate(m <= 1.0 + 2.0 * eps, m, u)


# ---------------------------------------------------------------------------
# adjoint, dilations, central conjugation


@dataclass(frozen=True, eq=False)
class AdjointMap:
    """The unital positive map ``Phi*(w, t) = (A^T w, t + <c, w>)``."""

    channel: Channel

    def __call__(self, x: SpinElement) -> SpinElement:
        if x.d != self.channel.d:
            raise DimensionMismatchError("dimension mismatch in adjoint")
        return SpinElement(self.channel.A.T @ x.v, x.s + float(self.channel.c @ x.v))


def adjoint(phi: Channel) -> AdjointMap:
    return AdjointMap(phi)


def dilation(z: SpinElement, r: float) -> Channel:
    """``x -> (1 - r) z + r x`` as a channel (``A = r I``, ``c = 2 (1 - r) v_z``)."""
    as_state(z)
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"dilation factor must lie in [0, 1], got {r!r}")
    return Channel(r * np.eye(z.d), 2.0 * (1.0 - r) * z.v)


def central_conjugate(phi: Channel, r: float) -> Channel:
    """``D_r o phi o D_r^-1`` for the central dilation ``D_r``: ``(A, r c)``."""
    if not 0.0 < r <= 1.0:
        raise ValueError(f"r must lie in (0, 1], got {r!r}")
    return Channel(phi.A, r * phi.c)


def rotation(d: int, i: int, j: int, angle: float) -> Channel:
    """Planar rotation by ``angle`` in the ``(e_i, e_j)`` plane."""
    A = np.eye(d)
    co, si = np.cos(angle), np.sin(angle)
    A[i, i] = A[j, j] = co
    A[i, j] = -si
    A[j, i] = si
    return Channel(A, np.zeros(d))


def random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def sample_channel(rng: np.random.Generator, d: int, radius: float | None = None) -> Channel:
    """Gaussian ``(A, c)`` rescaled so the certified max norm equals ``radius``.

    ``radius`` defaults to a uniform draw from ``[0.3, 1.0]``.
    """
    A = rng.standard_normal((d, d))
    c = rng.standard_normal(d)
    if radius is None:
        radius = rng.uniform(0.3, 1.0)
    m, _ = max_norm_on_ball(A, c)
    t = radius / m
    return Channel(t * A, t * c)


def sample_dilation(rng: np.random.Generator, d: int) -> Channel:
    """Dilation around a random pure state.

    Half the factors are uniform on ``[0, 1)``, half are ``1 - 10^(-4U)``,
    since weak contractions are where dilation monotonicity is most fragile.
    """
    from .algebra import random_pure_state

    z = random_pure_state(rng, d)
    r = rng.random() if rng.random() < 0.5 else 1.0 - 10.0 ** (-4.0 * rng.random())
    return dilation(z, r)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one Monte-Carlo trial; replayable from ``(seed, index)``."""
    return np.random.default_rng([int(seed), int(index)])


# ---------------------------------------------------------------------------
# Poissonisation and the fixed-point retraction


def poissonize(phi: Channel, mu: float, tail: float = 1e-16) -> Channel:
    """``sum_n Poisson(n; mu) phi^n``, summed until the Poisson tail drops below ``tail``."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    if mu == 0:
        return Channel.identity(phi.d)
    n_max = int(mu + 10.0 * np.sqrt(mu) + 40)
    while stats.poisson.sf(n_max, mu) >= tail:
        n_max = int(n_max * 1.5) + 10
    weights = stats.poisson.pmf(np.arange(n_max + 1), mu)
    M = phi.homogeneous()
    power = np.eye(phi.d + 1)
    acc = np.zeros_like(power)
    for w in weights:
        acc += w * power
        power = power @ M
    acc /= weights.sum()
    return Channel.from_homogeneous(acc)


def idempotence_residual(phi: Channel) -> float:
    return compose(phi, phi).distance(phi)


def fixpoint_retraction(phi: Channel, rank_tol: float = 1e-10, tol: float = 1e-8) -> Channel:
    """The limit ``mu -> inf`` of :func:`poissonize`.

    Each eigenvalue ``l`` of the homogeneous matrix is damped to ``exp(mu (l - 1))``,
    so only the eigenvalue-1 eigenspace survives: the limit is the projector
    onto ``ker(M - I)`` along ``range(M - I)``.
    """
    M = phi.homogeneous()
    N = M - np.eye(M.shape[0])
    U, S, Vt = np.linalg.svd(N)
    rank = int(np.sum(S > rank_tol * max(1.0, S[0] if S.size else 0.0)))
    K = Vt[rank:].T
    R = U[:, :rank]
    B = np.hstack([K, R])
    cond = np.linalg.cond(B)
    if not np.isfinite(cond) or cond > 1e12:
        raise ConvergenceError(
            f"eigenvalue 1 is not semisimple (cond={cond:.3g}); the Poisson limit does not exist"
        )
    P = K @ np.linalg.inv(B)[: K.shape[1], :]
    out = Channel.from_homogeneous(P)
    res = idempotence_residual(out)
    if res > tol:
        raise ConvergenceError(f"fixed-point retraction not idempotent: residual {res:.3g} > {tol:.3g}")
    return out


# ---------------------------------------------------------------------------
# conditional expectations


def conditional_expectation(basis, d: int) -> Channel:
    """Coordinate projection ``(v1 + v2, s) -> (v1, s)`` onto ``span(basis)``.

    ``basis`` is a (possibly empty) sequence of vectors in R^d; it is
    orthonormalised first.  An empty basis gives the constant map to the centre.
    """
    B = np.asarray(basis, dtype=float).reshape(-1, d)
    if B.shape[0] == 0:
        return Channel(np.zeros((d, d)), np.zeros(d))
    q, r = np.linalg.qr(B.T)
    keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, np.abs(r).max())
    q = q[:, keep]
    return Channel(q @ q.T, np.zeros(d))


def check_conditional(E: Channel, a: SpinElement, x: SpinElement, tol: float = 1e-10) -> float:
    """``||E(a.x) - a.E(x)||_inf`` for ``a`` in the fixed subalgebra of ``E``."""
    res = idempotence_residual(E)
    if res > tol:
        raise ValueError(f"E is not idempotent (residual {res:.3g})")
    if apply(E, a).max_abs_diff(a) > tol * max(1.0, a.norm_v(), abs(a.s)):
        raise ValueError("a is not fixed by E")
    return apply(E, bullet(a, x)).max_abs_diff(bullet(a, apply(E, x)))


# ---------------------------------------------------------------------------
# Petz recovery


@dataclass(frozen=True, eq=False)
class RecoveryMap:
    """``Psi(rho) = U_{sigma^1/2}( Phi*( U_{Phi(sigma)^-1/2}(rho) ) )``."""

    forward: Channel
    anchor: SpinElement
    _sqrt_anchor: SpinElement
    _inv_sqrt_image: SpinElement

    def __call__(self, rho: SpinElement) -> SpinElement:
        inner = quadratic_rep(self._inv_sqrt_image, rho)
        return quadratic_rep(self._sqrt_anchor, adjoint(self.forward)(inner))


def petz_recovery(phi: Channel, sigma: SpinElement, eps: float = EPS_POS) -> RecoveryMap:
    as_state(sigma)
    image = apply(phi, sigma)
    inv_sqrt = inv_sqrt_element(image, eps)  # raises SingularStateError
    return RecoveryMap(phi, sigma, sqrt_element(sigma, eps), inv_sqrt)


def is_isometry(phi: Channel, tol: float = 1e-12) -> bool:
    return bool(np.allclose(phi.A.T @ phi.A, np.eye(phi.d), atol=tol) and np.allclose(phi.c, 0.0, atol=tol))


def image_eigenvalues(phi: Channel, sigma: SpinElement) -> tuple[float, float]:
    return eigenvalues(apply(phi, sigma))


def map_matrix(fn: Callable[[SpinElement], SpinElement], d: int) -> np.ndarray:
    """Matrix of a linear map on JSpin_d in the basis ``(e_1, ..., e_d, 1)``."""
    cols = []
    for k in range(d + 1):
        e = np.zeros(d + 1)
        e[k] = 1.0
        y = fn(SpinElement(e[:d], e[d]))
        cols.append(np.append(y.v, y.s))
    return np.array(cols).T


__all__ = [
    "AdjointMap",
    "Channel",
    "RecoveryMap",
    "ValidityCertificate",
    "adjoint",
    "apply",
    "central_conjugate",
    "check_conditional",
    "compose",
    "conditional_expectation",
    "dilation",
    "fixpoint_retraction",
    "idempotence_residual",
    "image_eigenvalues",
    "is_isometry",
    "is_valid",
    "map_matrix",
    "max_norm_on_ball",
    "petz_recovery",
    "poissonize",
    "random_orthogonal",
    "rotation",
    "sample_channel",
    "sample_dilation",
    "trial_rng",
]
