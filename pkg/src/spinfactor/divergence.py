"""Trace-form potentials ``F(x) = tr f(x) = f(l_-) + f(l_+)`` and their divergences.

A :class:`Generator` bundles a convex scalar function with its first two
derivatives.  All three must accept numpy arrays.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import xlogy

from .algebra import (
    EPS_DEG,
    SpinElement,
    apply_function,
    as_state,
    eigenvalues,
    trace_inner,
)
from .errors import ConvergenceError, DomainError


@dataclass(frozen=True, eq=False)
class Generator:
    name: str
    f: Callable
    f_prime: Callable
    f_double_prime: Callable
    params: dict = field(default_factory=dict)
    symmetric: bool = False
    # f' diverges at the left end of the domain (shannon, tsallis alpha < 1, ...)
    singular_gradient: bool = False
    domain_min: float = 0.0
    # (a, b) -> f(a) - f(b) - f'(b)(a - b), vectorised, free of cancellation
    scalar_bregman: Callable | None = None

    @property
    def spec(self) -> dict:
        return {"name": self.name, **self.params}

    def __repr__(self):
        return f"Generator({json.dumps(self.spec)})"


# ---------------------------------------------------------------------------
# scalar divergences


def _log_bregman(A, B):
    """``A ln(A/B) - A + B`` written as ``B h((A - B)/B)``, ``h(u) = (1 + u) log1p(u) - u``."""
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    with np.errstate(all="ignore"):
        u = (A - B) / B
        h = np.where(A == 0, 1.0, (1.0 + u) * np.log1p(u) - u)
        out = B * h
    out = np.where(B == 0, np.where(A == 0, 0.0, np.inf), out)
    return out


def _naive_scalar(f: Generator):
    def fn(a, b):
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        with np.errstate(all="ignore"):
            return f.f(a) - f.f(b) - f.f_prime(b) * (a - b)

    return fn


# ---------------------------------------------------------------------------
# catalogue


def shannon() -> Generator:
    """``x ln x`` (minus von Neumann entropy), with ``0 ln 0 = 0``."""
    return Generator(
        "shannon",
        lambda x: xlogy(x, x),
        lambda x: np.log(x) + 1.0,
        lambda x: 1.0 / np.asarray(x, float),
        singular_gradient=True,
        scalar_bregman=_log_bregman,
    )


def tsallis(alpha: float) -> Generator:
    """``(x^a - x) / (a - 1)``, i.e. ``x log_a(x)``; ``a = 1`` is :func:`shannon`."""
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError(f"Tsallis order must be positive, got {alpha!r}")
    if alpha == 1.0:
        g = shannon()
        return Generator(
            "tsallis", g.f, g.f_prime, g.f_double_prime, {"alpha": 1.0},
            singular_gradient=True, scalar_bregman=_log_bregman,
        )
    a = alpha

    # x^(a-1) - 1 through expm1, so orders close to 1 do not cancel
    def pow_m1(x):
        x = np.asarray(x, float)
        with np.errstate(all="ignore"):
            return np.expm1((a - 1.0) * np.log(x))

    def f(x):
        x = np.asarray(x, float)
        with np.errstate(all="ignore"):
            return np.where(x == 0, 0.0, x * pow_m1(x) / (a - 1.0))

    return Generator(
        "tsallis",
        f,
        lambda x: a * pow_m1(x) / (a - 1.0) + 1.0,
        lambda x: a * np.power(np.asarray(x, float), a - 2.0),
        {"alpha": alpha},
        symmetric=(a == 2.0),
        singular_gradient=(a < 1.0),
    )


def quadratic() -> Generator:
    """``x^2``; its divergence is ``tr[(rho - sigma)^2]``."""
    return Generator(
        "quadratic",
        lambda x: np.square(x),
        lambda x: 2.0 * np.asarray(x, float),
        lambda x: np.full_like(np.asarray(x, float), 2.0),
        symmetric=True,
        domain_min=-math.inf,
        scalar_bregman=lambda a, b: np.square(np.asarray(a, float) - np.asarray(b, float)),
    )


def e_lambda(lam: float) -> Generator:
    """``(lam + x) ln(lam + x)``; its divergence is ``D(rho + lam || sigma + lam)``."""
    lam = float(lam)
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam!r}")
    return Generator(
        "e_lambda",
        lambda x: xlogy(lam + np.asarray(x, float), lam + np.asarray(x, float)),
        lambda x: np.log(lam + np.asarray(x, float)) + 1.0,
        lambda x: 1.0 / (lam + np.asarray(x, float)),
        {"lambda": lam},
        singular_gradient=True,
        domain_min=-lam,
        scalar_bregman=lambda a, b: _log_bregman(lam + np.asarray(a, float), lam + np.asarray(b, float)),
    )


def mixture(gamma: float = 0.0, lambdas: Sequence[float] = (), weights: Sequence[float] = ()) -> Generator:
    """``gamma/2 x^2 + sum_k w_k e_{lambda_k}(x)``: a finitely supported member of the jointly convex class."""
    gamma = float(gamma)
    lambdas = [float(t) for t in lambdas]
    weights = [float(w) for w in weights]
    if gamma < 0 or any(t < 0 for t in lambdas) or any(w < 0 for w in weights):
        raise ValueError("gamma, lambdas and weights must be non-negative")
    if len(lambdas) != len(weights):
        raise ValueError("lambdas and weights must have equal length")
    if gamma == 0 and not any(weights):
        raise ValueError("mixture is identically zero")
    parts = [e_lambda(t) for t in lambdas]

    def combine(attr, quad):
        def fn(x):
            x = np.asarray(x, float)
            out = quad(x)
            for w, g in zip(weights, parts):
                if w:
                    out = out + w * getattr(g, attr)(x)
            return out

        return fn

    def scalar(a, b):
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        out = 0.5 * gamma * np.square(a - b)
        for w, g in zip(weights, parts):
            if w:
                out = out + w * g.scalar_bregman(a, b)
        return out

    active = [t for t, w in zip(lambdas, weights) if w > 0]
    return Generator(
        "mixture",
        combine("f", lambda x: 0.5 * gamma * np.square(x)),
        combine("f_prime", lambda x: gamma * x),
        combine("f_double_prime", lambda x: np.full_like(x, gamma)),
        {"gamma": gamma, "lambdas": lambdas, "weights": weights},
        singular_gradient=bool(active) and min(active) == 0.0,
        domain_min=-min(active) if active else -math.inf,
        scalar_bregman=scalar,
    )


def shifted_generator(f: Generator, r: float) -> Generator:
    """``t -> f((1 - r)/2 + r t)``: the potential of ``(1 - r) * centre + r * x``."""
    r = float(r)
    if not 0.0 < r <= 1.0:
        raise ValueError(f"r must lie in (0, 1], got {r!r}")
    if r == 1.0:
        return f
    a = 0.5 * (1.0 - r)

    def shift(x):
        return a + r * np.asarray(x, float)

    lo = (f.domain_min - a) / r
    base = f.scalar_bregman
    return Generator(
        "shifted",
        lambda x: f.f(shift(x)),
        lambda x: r * f.f_prime(shift(x)),
        lambda x: r * r * f.f_double_prime(shift(x)),
        {"r": r, "base": f.spec},
        symmetric=f.symmetric,
        # the shifted argument stays >= a > 0 on states, but the cone boundary moves with it
        singular_gradient=f.singular_gradient,
        domain_min=lo,
        scalar_bregman=None if base is None else (lambda p, q: base(shift(p), shift(q))),
    )


_BUILDERS = {
    "shannon": lambda p: shannon(),
    "quadratic": lambda p: quadratic(),
    "tsallis": lambda p: tsallis(p["alpha"]),
    "e_lambda": lambda p: e_lambda(p["lambda"]),
    "mixture": lambda p: mixture(p.get("gamma", 0.0), p.get("lambdas", ()), p.get("weights", ())),
    "shifted": lambda p: shifted_generator(generator_from_spec(p["base"]), p["r"]),
}

_SHORT_PARAM = {"tsallis": "alpha", "e_lambda": "lambda"}


def builtin_generators() -> dict[str, Callable[..., Generator]]:
    return {
        "shannon": shannon,
        "tsallis": tsallis,
        "quadratic": quadratic,
        "e_lambda": e_lambda,
        "mixture": mixture,
    }


def generator_from_spec(spec) -> Generator:
    """Build a generator from ``{"name": ..., **params}``, a JSON string, or ``name[:param]``."""
    if isinstance(spec, Generator):
        return spec
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            spec = json.loads(text)
        else:
            name, _, arg = text.partition(":")
            spec = {"name": name}
            if arg:
                if name not in _SHORT_PARAM:
                    raise ValueError(f"generator {name!r} takes no shorthand parameter")
                spec[_SHORT_PARAM[name]] = float(arg)
    if not isinstance(spec, dict) or "name" not in spec:
        raise ValueError(f"malformed generator spec: {spec!r}")
    name = spec["name"]
    if name not in _BUILDERS:
        raise ValueError(f"unknown generator {name!r}; choose from {sorted(_BUILDERS)}")
    try:
        return _BUILDERS[name](spec)
    except KeyError as exc:
        raise ValueError(f"generator {name!r} is missing parameter {exc}") from None


# ---------------------------------------------------------------------------
# evaluation helpers


def _spectrum(f: Generator, x: SpinElement) -> tuple[np.ndarray, np.ndarray, float]:
    """Eigenvalues ``[l_-, l_+]`` (within ``EPS_DEG`` of the domain edge snapped onto it), the axis and ``||v||``."""
    r = x.norm_v()
    lam = np.array([x.s - r, x.s + r])
    lo = f.domain_min
    if math.isfinite(lo):
        # rounding puts rotated pure states a few ulps off the edge, on either side
        near = np.abs(lam - lo) <= EPS_DEG
        lam[near] = lo
        if lam[0] < lo:
            raise DomainError(f"eigenvalue {lam[0]!r} outside the domain of {f.name} (>= {lo!r})", eigenvalue=lam[0])
    u = x.v / r if r >= EPS_DEG else np.eye(x.d)[0]
    return lam, u, r


def _values(fn: Callable, lam: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        return np.asarray(fn(lam), dtype=float)


def potential(f: Generator, x: SpinElement) -> float:
    lam, _, _ = _spectrum(f, x)
    vals = _values(f.f, lam)
    if not np.all(np.isfinite(vals)):
        bad = lam[~np.isfinite(vals)][0]
        raise DomainError(f"{f.name} undefined at eigenvalue {bad!r}", eigenvalue=bad)
    return float(vals[0] + vals[1])


def gradient(f: Generator, x: SpinElement) -> SpinElement | None:
    """``f'(x)`` as an element, or ``None`` where ``f'`` diverges on the spectrum."""
    lam, u, _ = _spectrum(f, x)
    g = _values(f.f_prime, lam)
    if not np.all(np.isfinite(g)):
        return None
    return SpinElement(0.5 * (g[1] - g[0]) * u, 0.5 * (g[0] + g[1]))


def _same(x: SpinElement, y: SpinElement) -> bool:
    return x.s == y.s and bool(np.array_equal(x.v, y.v))


def bregman_direct(f: Generator, x: SpinElement, y: SpinElement) -> float:
    """``F(x) - F(y) - tr[f'(y) . (x - y)]`` evaluated literally."""
    if _same(x, y):
        return 0.0
    grad = gradient(f, y)
    if grad is None:
        return math.inf
    return potential(f, x) - potential(f, y) - trace_inner(grad, x - y)


def bregman_spectral(f: Generator, x: SpinElement, y: SpinElement) -> float:
    """``sum_ij tr[p_i . q_j] d_f(a_i, b_j)`` over the spectral pairs of ``x`` and ``y``.

    ``d_f`` is the scalar divergence; the overlaps ``tr[p_i . q_j]`` of the
    minimal idempotents are ``(1 +/- <u, w>)/2``.  Equal to
    :func:`bregman_direct` because each row and column of overlaps sums to 1,
    but it never subtracts two potentials, so it keeps its relative precision
    when ``F`` is large (``e_lambda`` with big ``lambda``).
    """
    if _same(x, y):
        return 0.0
    if gradient(f, y) is None:
        return math.inf
    a, u, _ = _spectrum(f, x)
    b, w, _ = _spectrum(f, y)
    c = float(np.clip(u @ w, -1.0, 1.0))
    # rows index x's eigenvalues (-, +), columns y's (-, +)
    overlap = 0.5 * np.array([[1.0 + c, 1.0 - c], [1.0 - c, 1.0 + c]])
    scalar = f.scalar_bregman or _naive_scalar(f)
    terms = scalar(a[:, None], b[None, :])
    return float(np.sum(np.where(overlap > 0, overlap * terms, 0.0)))


def bregman_cone(f: Generator, x: SpinElement, y: SpinElement) -> float:
    """``D_F(x, y)`` for positive ``x, y``.

    Returns ``inf`` when ``f'`` diverges on the spectrum of ``y`` and ``x != y``.
    Generators with a stable scalar divergence go through
    :func:`bregman_spectral`, the rest through :func:`bregman_direct`.
    """
    if not x.is_positive() or not y.is_positive():
        raise DomainError("bregman_cone needs positive elements")
    if f.scalar_bregman is not None:
        return bregman_spectral(f, x, y)
    return bregman_direct(f, x, y)


def bregman(f: Generator, rho: SpinElement, sigma: SpinElement) -> float:
    """Bregman divergence ``D_F(rho, sigma)`` between two states."""
    as_state(rho)
    as_state(sigma)
    return bregman_cone(f, rho, sigma)


def information_divergence(x: SpinElement, y: SpinElement) -> float:
    """``tr[x (ln x - ln y) - x + y]``, evaluated term by term through the spectral calculus."""
    if _same(x, y):
        return 0.0
    lo, _ = eigenvalues(y)
    if lo <= 0:
        return math.inf
    xlnx = apply_function(lambda t: xlogy(max(t, 0.0), max(t, 0.0)), x)
    lny = apply_function(math.log, y)
    return xlnx.trace() - trace_inner(x, lny) - x.trace() + y.trace()


def mix_identity_sides(rho: SpinElement, sigma: SpinElement, lam: float) -> tuple[float, float]:
    """Both sides of ``D(rho + lam || sigma + lam) = (1 + 2 lam) D(m(rho) || m(sigma))``.

    ``m(x) = x / (1 + 2 lam) + 2 lam / (1 + 2 lam) * centre``.
    """
    d = rho.d
    one = SpinElement(np.zeros(d), 1.0)
    g = shannon()
    lhs = bregman_cone(g, rho + lam * one, sigma + lam * one)
    k = 1.0 + 2.0 * lam
    ctr = SpinElement(np.zeros(d), 0.5)
    m_rho = rho / k + (2.0 * lam / k) * ctr
    m_sigma = sigma / k + (2.0 * lam / k) * ctr
    return lhs, k * bregman_cone(g, m_rho, m_sigma)


# ---------------------------------------------------------------------------
# local divergence


def local_divergence(f: Generator, x: SpinElement, y: SpinElement) -> float:
    """``d^2/ds^2 F((1 - s) x + s y)`` at ``s = 1``: the Hessian form at ``y``.

    Along the segment the eigenvalues are ``s(t) -/+ ||w(t)||``.  With
    ``h = x - y`` and ``r = ||v_y||``, ``r' = <v_y, h_v>/r`` and
    ``r'' = (||h_v||^2 - r'^2) / r``, so

        D = f''(l+)(h_s + r')^2 + f''(l-)(h_s - r')^2 + (f'(l+) - f'(l-)) r''.

    The last term is a divided difference that tends to ``2 f''(s)`` as ``r -> 0``.
    """
    if x.d != y.d:
        from .errors import DimensionMismatchError

        raise DimensionMismatchError("dimension mismatch")
    if _same(x, y):
        return 0.0
    lam, u, r = _spectrum(f, y)
    f2 = _values(f.f_double_prime, lam)
    if not np.all(np.isfinite(f2)):
        raise DomainError(f"f'' of {f.name} diverges on the spectrum of y: {lam.tolist()}", eigenvalue=lam[0])
    h = x - y
    hs = h.s
    hv2 = float(h.v @ h.v)
    if r < 1e-6:
        rp = float(u @ h.v)
        q = 0.5 * (f2[0] + f2[1])
    else:
        rp = float(u @ h.v)
        f1 = _values(f.f_prime, lam)
        q = (f1[1] - f1[0]) / (2.0 * r)
    return float(f2[1] * (hs + rp) ** 2 + f2[0] * (hs - rp) ** 2 + 2.0 * q * (hv2 - rp * rp))


def local_divergence_fd(f: Generator, x: SpinElement, y: SpinElement, rel_step: float = 2e-3) -> float:
    """Five-point finite-difference estimate of :func:`local_divergence`.

    Only evaluates the potential.  The step in ``s`` is chosen so the
    eigenvalues move by ``rel_step`` times their distance from the domain edge.
    """
    h = x - y
    disp = abs(h.s) + h.norm_v()
    if disp == 0:
        return 0.0
    lam, _, _ = _spectrum(f, y)
    gap = lam[0] - f.domain_min if math.isfinite(f.domain_min) else 1.0
    gap = min(gap, 1.0)
    step = rel_step * gap / disp

    # x_s = y + (1 - s) h, parametrised by t = 1 - s so tiny displacements stay exact
    def g(t):
        return potential(f, y + t * h)

    return (-g(-2 * step) + 16 * g(-step) - 30 * g(0.0) + 16 * g(step) - g(2 * step)) / (12.0 * step * step)


def integral_representation(
    f: Generator, x: SpinElement, y: SpinElement, epsabs: float = 1e-9, epsrel: float = 1e-10
) -> float:
    """``int_0^1 D^F(x, x_s) / s ds`` with ``x_s = (1 - s) x + s y``.

    The integrand is ``O(s)`` at the left end and is taken to be 0 there.
    """
    if _same(x, y):
        return 0.0

    def integrand(s):
        if s <= 0.0:
            return 0.0
        return local_divergence(f, x, (1.0 - s) * x + s * y) / s

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel, limit=200)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"quadrature did not converge: {exc}") from exc
    return float(val)


# ---------------------------------------------------------------------------
# identities


def bregman_identity_residual(f: Generator, weights, rhos: Sequence[SpinElement], sigma: SpinElement) -> float:
    """``|sum t_i D(rho_i, sigma) - sum t_i D(rho_i, bar) - D(bar, sigma)|`` with ``bar = sum t_i rho_i``."""
    t = np.asarray(weights, float)
    if t.ndim != 1 or t.size != len(rhos):
        raise ValueError("one weight per state required")
    if np.any(t < 0) or abs(t.sum() - 1.0) > 1e-12:
        raise ValueError("weights must form a probability vector")
    bar = barycenter(t, rhos)
    lhs = sum(ti * bregman(f, r, sigma) for ti, r in zip(t, rhos))
    rhs = sum(ti * bregman(f, r, bar) for ti, r in zip(t, rhos)) + bregman(f, bar, sigma)
    return abs(lhs - rhs)


def barycenter(weights, states: Sequence[SpinElement]) -> SpinElement:
    t = np.asarray(weights, float)
    v = sum(ti * x.v for ti, x in zip(t, states))
    s = sum(ti * x.s for ti, x in zip(t, states))
    return SpinElement(v, s)
