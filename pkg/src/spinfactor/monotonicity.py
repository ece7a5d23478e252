"""Monotonicity of Bregman divergences under channels and dilations.

On the interval ``[0, 1]`` (equivalently JSpin_1) the trace-form potential is
``F(y) = f(y) + f(1 - y)``; its divergence is monotone exactly when
``y -> y^2 F''(y)`` increases.  For the Tsallis family the sign of the
derivative of that function reduces to

    alpha + (2 z + 2 - alpha) z^(alpha - 3),     z = 1/y - 1 > 0,

which is positive for ``alpha <= 2``, unbounded below for ``2 < alpha < 3`` and
for ``alpha >= 3`` has its minimum ``alpha - ((alpha - 3)/2)^(alpha - 3)`` at
``z = (alpha - 3)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .algebra import SpinElement, random_boundary_state, random_state
from .channels import (
    Channel,
    apply,
    dilation,
    petz_recovery,
    sample_channel,
    sample_dilation,
    trial_rng,
)
from .divergence import Generator, bregman
from .errors import SingularStateError

EXCESS_TOL = 1e-9
EQUALITY_TOL = 1e-8


def log_grid(samples: int, edge: float = 1e-8) -> np.ndarray:
    """Points in ``(0, 1)`` log-spaced towards both ends."""
    half = np.geomspace(edge, 0.5, samples // 2 + 1)
    return np.unique(np.concatenate([half, 1.0 - half[::-1]]))


def interval_curvature(f: Generator, y) -> np.ndarray:
    """``F''(y) = f''(y) + f''(1 - y)``."""
    y = np.asarray(y, float)
    with np.errstate(all="ignore"):
        return f.f_double_prime(y) + f.f_double_prime(1.0 - y)


class CriterionResult(NamedTuple):
    monotone: bool
    witness: tuple[float, float] | None  # y1 < y2 with y^2 F''(y) decreasing


def dilation_criterion(f: Generator, samples: int = 1000, rel_tol: float = 1e-12) -> CriterionResult:
    """Is ``y^2 F''(y)`` increasing on a log-spaced grid of ``(0, 1)``?"""
    y = log_grid(samples)
    vals = y * y * interval_curvature(f, y)
    drop = vals[:-1] - vals[1:]
    bad = np.flatnonzero(drop > rel_tol * np.maximum(np.abs(vals[:-1]), np.abs(vals[1:])))
    if bad.size:
        i = int(bad[0])
        return CriterionResult(False, (float(y[i]), float(y[i + 1])))
    return CriterionResult(True, None)


# ---------------------------------------------------------------------------
# Tsallis order analysis


def tsallis_sign_expression(alpha: float, z):
    """``alpha + (2 z + 2 - alpha) z^(alpha - 3)``; same sign as ``d/dy [y^2 F''(y)]``."""
    z = np.asarray(z, float)
    if np.any(z <= 0):
        raise ValueError("z must be positive")
    out = alpha + (2.0 * z + 2.0 - alpha) * np.power(z, alpha - 3.0)
    return float(out) if out.ndim == 0 else out


def sign_expression_minimizer(alpha: float) -> float:
    """Stationary point ``z* = (alpha - 3)/2`` of the sign expression (``alpha > 3``)."""
    return 0.5 * (alpha - 3.0)


def critical_gap(alpha: float) -> float:
    """``alpha - ((alpha - 3)/2)^(alpha - 3)``, the sign-expression minimum for ``alpha >= 3``.

    At ``alpha = 3`` the power is the ``0^0`` form and takes its right limit 1.
    """
    if alpha < 3.0:
        raise ValueError("defined for alpha >= 3")
    if alpha == 3.0:
        return 2.0
    z = 0.5 * (alpha - 3.0)
    return alpha - z ** (alpha - 3.0)


def critical_alpha(tol: float = 1e-10, lo: float = 3.0, hi: float = 10.0) -> float:
    """Root of :func:`critical_gap` on ``(3, 10)``: bisection, then secant polish."""
    g_lo, g_hi = critical_gap(lo), critical_gap(hi)
    if g_lo * g_hi >= 0:
        raise ArithmeticError(f"no sign change on [{lo}, {hi}]")
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        g_mid = critical_gap(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    a, b, ga, gb = lo, hi, g_lo, g_hi
    for _ in range(50):
        if gb == ga:
            break
        c = b - gb * (b - a) / (gb - ga)
        a, ga = b, gb
        b, gb = c, critical_gap(c)
        if abs(gb) <= tol:
            break
    if abs(gb) > tol:
        # secant can stall on the last few ulps; fall back to the bracket midpoint
        b = 0.5 * (lo + hi)
        gb = critical_gap(b)
        if abs(gb) > tol:
            raise ArithmeticError(f"could not reach |g| <= {tol}: {gb!r}")
    return b


class Classification(NamedTuple):
    monotone: bool
    reason: str


def tsallis_classification(alpha: float) -> Classification:
    """Monotonicity of the order-``alpha`` divergence under dilations."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    a_star = critical_alpha()
    if alpha <= 2.0:
        return Classification(True, "alpha <= 2: sign expression positive for all z > 0")
    if alpha < 3.0:
        return Classification(False, "2 < alpha < 3: sign expression tends to -inf as z -> 0")
    if alpha <= a_star:
        return Classification(True, f"3 <= alpha <= {a_star:.6f}: minimum at z=(alpha-3)/2 is non-negative")
    return Classification(False, f"alpha > {a_star:.6f}: minimum at z=(alpha-3)/2 is negative")


# ---------------------------------------------------------------------------
# Monte-Carlo monotonicity


@dataclass
class Violation:
    trial: int
    channel: Channel
    rho: SpinElement
    sigma: SpinElement
    d_before: float
    d_after: float

    @property
    def excess(self) -> float:
        return self.d_after - self.d_before

    def to_json(self) -> dict:
        return {
            "trial": self.trial,
            "excess": self.excess,
            "D_before": self.d_before,
            "D_after": self.d_after,
            "A": self.channel.A.tolist(),
            "c": self.channel.c.tolist(),
            "rho": self.rho.v.tolist(),
            "sigma": self.sigma.v.tolist(),
        }


@dataclass
class MonotonicityReport:
    generator: dict
    d: int
    trials: int
    seed: int
    tol: float
    dilations_only: bool = False
    violations: list[Violation] = field(default_factory=list)

    @property
    def max_excess(self) -> float:
        return max((v.excess for v in self.violations), default=0.0)

    @property
    def clean(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "generator": self.generator,
            "d": self.d,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "dilations_only": self.dilations_only,
            "violations": len(self.violations),
            "max_excess": self.max_excess,
            "witnesses": [v.to_json() for v in self.violations],
        }


def sample_trial(d: int, seed: int, index: int, dilations_only: bool = False):
    """The ``(channel, rho, sigma)`` triple of one trial; a pure function of its arguments."""
    rng = trial_rng(seed, index)
    if not dilations_only:
        return sample_channel(rng, d), random_state(rng, d), random_state(rng, d)
    # dilation failures live near the boundary, so half the states are drawn there
    phi = sample_dilation(rng, d)
    pair = [random_boundary_state(rng, d) if rng.random() < 0.5 else random_state(rng, d) for _ in range(2)]
    return phi, pair[0], pair[1]


def run_trial(f: Generator, d: int, seed: int, index: int, dilations_only: bool = False) -> Violation:
    """Evaluate one trial; returned as a :class:`Violation` record whatever its excess."""
    phi, rho, sigma = sample_trial(d, seed, index, dilations_only)
    before = bregman(f, rho, sigma)
    after = bregman(f, apply(phi, rho), apply(phi, sigma))
    return Violation(index, phi, rho, sigma, before, after)


def empirical_monotonicity(
    f: Generator,
    d: int,
    trials: int,
    seed: int = 0,
    tol: float = EXCESS_TOL,
    dilations_only: bool = False,
) -> MonotonicityReport:
    """Record every trial with ``D(Phi rho, Phi sigma) > D(rho, sigma) + tol``.

    An infinite ``D(rho, sigma)`` never counts.
    """
    report = MonotonicityReport(f.spec, d, trials, seed, tol, dilations_only)
    for i in range(trials):
        rec = run_trial(f, d, seed, i, dilations_only)
        if math.isinf(rec.d_before):
            continue
        if rec.d_after > rec.d_before + tol:
            report.violations.append(rec)
    return report


# ---------------------------------------------------------------------------
# deterministic dilation search on the interval


@dataclass(frozen=True)
class DilationWitness:
    x: float
    y: float
    r: float
    z: float  # endpoint 0 or 1 the dilation contracts towards
    d_before: float
    d_after: float

    @property
    def excess(self) -> float:
        return self.d_after - self.d_before

    def replay(self, f: Generator) -> tuple[float, float]:
        """Recompute ``(D_before, D_after)`` through JSpin_1 states and a channel."""
        x = SpinElement([self.x - 0.5], 0.5)
        y = SpinElement([self.y - 0.5], 0.5)
        phi = dilation(SpinElement([self.z - 0.5], 0.5), self.r)
        return bregman(f, x, y), bregman(f, apply(phi, x), apply(phi, y))

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "r": self.r,
            "z": self.z,
            "D_before": self.d_before,
            "D_after": self.d_after,
            "excess": self.excess,
        }


def interval_bregman(f: Generator, x, y) -> np.ndarray:
    """``F(x) - F(y) - F'(y)(x - y)`` with ``F(t) = f(t) + f(1 - t)``, vectorised."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    with np.errstate(all="ignore"):
        Fx = f.f(x) + f.f(1.0 - x)
        Fy = f.f(y) + f.f(1.0 - y)
        dFy = f.f_prime(y) - f.f_prime(1.0 - y)
    return Fx - Fy - dFy * (x - y)


def default_search_grid(points: int = 161, factors: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Uniform interior points joined with log-spaced points near both ends; ``r`` in ``(0, 1)``."""
    pts = np.unique(np.concatenate([np.linspace(1e-3, 1 - 1e-3, points), log_grid(80, edge=1e-7)]))
    rs = np.unique(np.concatenate([np.linspace(0.02, 0.99, factors), 1.0 - np.geomspace(1e-4, 1e-2, 10)]))
    return pts, rs


def dilation_violation_search(
    f: Generator, grid: tuple[np.ndarray, np.ndarray] | None = None, tol: float = EXCESS_TOL
) -> DilationWitness | None:
    """Grid search for a dilation that increases ``D_F`` by more than ``tol``.

    ``grid`` is ``(points, factors)``: interval points used for both arguments
    and dilation factors ``r``; dilations contract towards the endpoints 0 and 1.
    The scan runs over ``z = 0, 1`` and increasing ``r``; the first ``(z, r)``
    slice containing a violation returns its largest-excess pair.
    """
    pts, rs = default_search_grid() if grid is None else (np.asarray(grid[0], float), np.asarray(grid[1], float))
    X, Y = np.meshgrid(pts, pts, indexing="ij")
    before = interval_bregman(f, X, Y)
    for z in (0.0, 1.0):
        for r in rs:
            after = interval_bregman(f, (1 - r) * z + r * X, (1 - r) * z + r * Y)
            excess = np.where(np.isfinite(before) & np.isfinite(after), after - before, -np.inf)
            k = int(np.argmax(excess))
            if excess.flat[k] > tol:
                i, j = np.unravel_index(k, excess.shape)
                return DilationWitness(
                    float(X[i, j]), float(Y[i, j]), float(r), z, float(before[i, j]), float(after[i, j])
                )
    return None


# ---------------------------------------------------------------------------
# equality sets


@dataclass
class EqualityProbeReport:
    probes: list[SpinElement]
    equal: np.ndarray  # mask over probes
    midpoint_checks: int
    midpoint_failures: int
    recovery_residual: float | None  # max |Psi(Phi rho) - rho| over equality probes

    @property
    def equality_states(self) -> list[SpinElement]:
        return [p for p, e in zip(self.probes, self.equal) if e]

    @property
    def recovers(self) -> bool:
        return self.recovery_residual is not None and self.recovery_residual <= EQUALITY_TOL


def equality_set_probe(
    f: Generator,
    phi: Channel,
    sigma: SpinElement,
    samples: int = 200,
    seed: int = 0,
    tol: float = EQUALITY_TOL,
    max_pairs: int = 200,
) -> EqualityProbeReport:
    """Probe ``{rho : D(Phi rho, Phi sigma) = D(rho, sigma)}`` with random states.

    ``sigma`` itself is always a probe.  Midpoints of pairs of equality states
    are checked for membership, and the Petz map anchored at ``sigma`` is run on
    every equality state.
    """
    rng = np.random.default_rng(seed)
    d = sigma.d
    phi_sigma = apply(phi, sigma)

    def gap(rho):
        return abs(bregman(f, apply(phi, rho), phi_sigma) - bregman(f, rho, sigma))

    probes = [sigma] + [random_state(rng, d) for _ in range(samples)]
    equal = np.array([gap(p) <= tol for p in probes])
    members = [p for p, e in zip(probes, equal) if e]

    checks = failures = 0
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            if checks >= max_pairs:
                break
            checks += 1
            if gap(0.5 * (members[i] + members[j])) > tol:
                failures += 1

    residual = None
    try:
        psi = petz_recovery(phi, sigma)
    except SingularStateError:
        psi = None
    if psi is not None:
        residual = max(psi(apply(phi, p)).max_abs_diff(p) for p in members)
    return EqualityProbeReport(probes, equal, checks, failures, residual)
