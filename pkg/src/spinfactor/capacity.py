"""Minimax regret ``C_F = inf_sigma sup_rho D_F(rho, sigma)``.

For a finite set of states ``rho_i`` the minimax value equals
``max_t sum_i t_i D_F(rho_i, bar(t))``, and by the Bregman equation the
objective is ``J(t) = sum_i t_i F(rho_i) - F(bar(t))``, which is concave.
Any ``t`` gives the lower bound ``J(t)`` and the upper bound
``max_i D_F(rho_i, bar(t))``; their difference is the duality gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .algebra import SpinElement, as_state, center, eigenvalues, pure_state, trace_inner
from .divergence import Generator, barycenter, bregman, gradient, potential
from .errors import ConvergenceError

TOL = 1e-7
MAX_ITER = 100_000
#: minimum distance of the barycentre from the cone boundary for singular generators
BOUNDARY_MARGIN = 1e-9


@dataclass
class CapacityResult:
    value: float
    optimizer: SpinElement
    weights: np.ndarray
    gap: float
    iterations: int
    converged: bool = True
    states: list[SpinElement] = field(default_factory=list)
    upper: float = math.nan
    history: list[tuple[float, float]] = field(default_factory=list)  # (J, gap) per iterate

    def to_json(self, optimizer_label: str | None = None) -> dict:
        out = {
            "value": self.value if math.isfinite(self.value) else "inf",
            "optimizer": optimizer_label or self.optimizer.to_json(),
            "weights": [float(w) for w in self.weights],
            "gap": self.gap,
            "iterations": self.iterations,
            "converged": self.converged,
        }
        if math.isfinite(self.upper):
            out["upper_bound"] = self.upper
        return out


def capacity_closed_form(f: Generator, d: int) -> CapacityResult:
    """The ball's capacity is attained at the centre: ``D_F(pure, centre)``."""
    ctr = center(d)
    rho = pure_state(np.eye(d)[0])
    value = bregman(f, rho, ctr)
    return CapacityResult(value, ctr, np.array([1.0]), 0.0, 0, True, [rho], value)


# ---------------------------------------------------------------------------
# finite support


def _coords(states: Sequence[SpinElement]) -> np.ndarray:
    return np.stack([x.v for x in states])


def objective(f: Generator, weights, states: Sequence[SpinElement]) -> float:
    """``J(t) = sum_i t_i F(rho_i) - F(bar(t))``."""
    t = np.asarray(weights, float)
    F = np.array([potential(f, x) for x in states])
    return float(t @ F - potential(f, barycenter(t, states)))


def _divergences_to(f: Generator, states, bar: SpinElement) -> np.ndarray:
    return np.array([bregman(f, x, bar) for x in states])


def _bar_from_v(v: np.ndarray) -> SpinElement:
    return SpinElement(v, 0.5)


def _max_step(bar_v: np.ndarray, direction: np.ndarray, limit: float, margin: float) -> float:
    """Largest ``g <= limit`` with ``||bar + g dir|| <= 1/2 - margin``."""
    if margin <= 0:
        return limit
    a = float(direction @ direction)
    if a == 0:
        return limit
    b = float(bar_v @ direction)
    c = float(bar_v @ bar_v) - (0.5 - margin) ** 2
    if c > 0:
        return 0.0
    g = (-b + math.sqrt(b * b - a * c)) / a
    return min(limit, max(g, 0.0))


def _line_search(f: Generator, F: np.ndarray, t: np.ndarray, V: np.ndarray, dt: np.ndarray, gmax: float) -> float:
    """Exact maximiser of the concave ``g -> J(t + g dt)`` on ``[0, gmax]``."""
    if gmax <= 0:
        return 0.0
    dv = dt @ V
    dF = float(dt @ F)

    def deriv(g):
        bar = _bar_from_v((t + g * dt) @ V)
        grad = gradient(f, bar)
        if grad is None:
            return -math.inf
        # d/dg F(bar) = tr[f'(bar) . (dv, 0)]
        return dF - trace_inner(grad, SpinElement(dv, 0.0))

    d0 = deriv(0.0)
    if d0 <= 0:
        return 0.0
    d1 = deriv(gmax)
    if d1 >= 0:
        return gmax
    return optimize.brentq(deriv, 0.0, gmax, xtol=1e-16, rtol=1e-15, maxiter=200)


def capacity_finite(
    f: Generator,
    states: Sequence[SpinElement],
    tol: float = TOL,
    max_iter: int = MAX_ITER,
    record_history: bool = False,
) -> CapacityResult:
    """Frank-Wolfe with away steps on ``J`` over the simplex.

    The Frank-Wolfe vertex maximises ``D_F(rho_i, bar)`` (the gradient of ``J``
    is ``D_F(rho_i, bar) - J``).  The reported gap is ``U - J`` with ``U`` the
    smallest upper bound seen so far, so it never increases.
    """
    states = [as_state(x) for x in states]
    if not states:
        raise ValueError("need at least one state")
    d = states[0].d
    if any(x.d != d for x in states):
        raise ValueError("states must share a dimension")
    n = len(states)
    V = _coords(states)
    F = np.array([potential(f, x) for x in states])
    margin = BOUNDARY_MARGIN if f.singular_gradient else 0.0

    t = np.full(n, 1.0 / n)
    history = []
    upper = math.inf
    J = float(t @ F - potential(f, _bar_from_v(t @ V)))
    gap = math.inf
    it = 0
    for it in range(max_iter + 1):
        bar = _bar_from_v(t @ V)
        J = float(t @ F - potential(f, bar))
        D = _divergences_to(f, states, bar)
        upper = min(upper, float(D.max()))
        gap = max(upper - J, 0.0)
        if record_history:
            history.append((J, gap))
        if gap <= tol or it == max_iter:
            break
        fw = int(np.argmax(D))  # lowest index on ties
        active = np.flatnonzero(t > 0)
        away = int(active[np.argmin(D[active])])
        fw_gain = D[fw] - J
        away_gain = J - D[away]
        if fw_gain >= away_gain or away == fw:
            dt = -t.copy()
            dt[fw] += 1.0
            gmax = 1.0
        else:
            dt = t.copy()
            dt[away] -= 1.0
            gmax = t[away] / (1.0 - t[away]) if t[away] < 1.0 else 0.0
        gmax = _max_step(t @ V, dt @ V, gmax, margin)
        g = _line_search(f, F, t, V, dt, gmax)
        if g <= 0:
            # no ascent possible along either direction: J is already maximal to machine precision
            break
        t = t + g * dt
        t[np.abs(t) < 1e-300] = 0.0
        t = np.clip(t, 0.0, None)
        t /= t.sum()
    bar = _bar_from_v(t @ V)
    return CapacityResult(
        value=J,
        optimizer=bar,
        weights=t,
        gap=gap,
        iterations=it,
        converged=gap <= tol,
        states=states,
        upper=upper,
        history=history,
    )


@dataclass
class MinimaxReport:
    redundancy_slack: float  # C - sum t_i D(rho_i, bar) - D(bar, sigma_opt)
    maxred_slack: float  # max_i D(rho_i, sigma) - C - D(sigma_opt, sigma)
    ok: bool


def minimax_inequalities_check(
    f: Generator,
    result: CapacityResult,
    weights,
    sigma: SpinElement,
    slack_tol: float = 1e-8,
) -> MinimaxReport:
    """Evaluate both minimax inequalities for a mixture ``weights`` and probe ``sigma``.

    The capacity enters as ``value + gap`` (a certified upper bound) in the
    redundancy inequality and as ``value`` in the max-redundancy one, so both
    hold exactly for an unconverged result too.
    """
    states = result.states
    t = np.asarray(weights, float)
    bar = barycenter(t, states)
    opt = result.optimizer
    mixed = sum(ti * bregman(f, x, bar) for ti, x in zip(t, states) if ti > 0)
    red = (result.value + result.gap) - mixed - bregman(f, bar, opt)
    sup = max(bregman(f, x, sigma) for x in states)
    mr = sup - result.value - bregman(f, opt, sigma)
    return MinimaxReport(float(red), float(mr), red >= -slack_tol and mr >= -slack_tol)


# ---------------------------------------------------------------------------
# projections


@dataclass
class ProjectionResult:
    point: SpinElement
    weights: np.ndarray
    value: float  # D_F(point, sigma)
    gap: float
    iterations: int
    converged: bool
    slacks: np.ndarray  # per vertex: D(rho, sigma) - D(rho, point) - D(point, sigma)

    def pythagorean_slack(self, f: Generator, rho: SpinElement, sigma: SpinElement) -> float:
        return bregman(f, rho, sigma) - bregman(f, rho, self.point) - bregman(f, self.point, sigma)


def bregman_project(
    f: Generator,
    sigma: SpinElement,
    polytope: Sequence[SpinElement],
    tol: float = 1e-12,
    max_iter: int = MAX_ITER,
) -> ProjectionResult:
    """Minimise ``rho -> D_F(rho, sigma)`` over the convex hull of ``polytope``.

    Frank-Wolfe with away steps over hull weights.  The gradient of
    ``D_F(., sigma)`` at ``p`` is ``f'(p) - f'(sigma)``, so the linear
    subproblem picks the vertex minimising ``tr[(f'(p) - f'(sigma)) . rho_i]``.
    """
    polytope = [as_state(x) for x in polytope]
    as_state(sigma)
    if not polytope:
        raise ValueError("polytope must be non-empty")
    n = len(polytope)
    V = _coords(polytope)
    g_sigma = gradient(f, sigma)
    if g_sigma is None:
        raise ConvergenceError("f' diverges on sigma; the projection objective is infinite off sigma")
    margin = BOUNDARY_MARGIN if f.singular_gradient else 0.0

    def obj(v):
        return bregman(f, _bar_from_v(v), sigma)

    def lin(v):
        grad = gradient(f, _bar_from_v(v))
        if grad is None:
            return None
        w = grad.v - g_sigma.v
        return 2.0 * (V @ w)  # tr[(grad - g_sigma) . rho_i] up to a constant shared by all vertices

    t = np.full(n, 1.0 / n)
    # start from the vertex closest to sigma if the uniform mixture is farther
    best = int(np.argmin([bregman(f, x, sigma) for x in polytope]))
    if bregman(f, polytope[best], sigma) < obj(t @ V):
        t = np.zeros(n)
        t[best] = 1.0
    gap = math.inf
    it = 0
    for it in range(max_iter + 1):
        p = t @ V
        c = lin(p)
        if c is None:
            raise ConvergenceError("iterate reached the boundary where f' diverges")
        cur = float(c @ t)
        fw = int(np.argmin(c))
        gap = max(cur - float(c[fw]), 0.0)
        if gap <= tol or it == max_iter:
            break
        active = np.flatnonzero(t > 0)
        away = int(active[np.argmax(c[active])])
        if cur - c[fw] >= c[away] - cur or away == fw:
            dt = -t.copy()
            dt[fw] += 1.0
            gmax = 1.0
        else:
            dt = t.copy()
            dt[away] -= 1.0
            gmax = t[away] / (1.0 - t[away]) if t[away] < 1.0 else 0.0
        gmax = _max_step(p, dt @ V, gmax, margin)
        if gmax <= 0:
            break

        def deriv(g):
            q = (t + g * dt) @ V
            cq = lin(q)
            return math.inf if cq is None else float(cq @ dt)

        if deriv(gmax) <= 0:
            g = gmax
        else:
            g = optimize.brentq(deriv, 0.0, gmax, xtol=1e-16, rtol=1e-15, maxiter=200)
        if g <= 0:
            break
        t = np.clip(t + g * dt, 0.0, None)
        t /= t.sum()
    point = _bar_from_v(t @ V)
    slacks = np.array(
        [bregman(f, x, sigma) - bregman(f, x, point) - bregman(f, point, sigma) for x in polytope]
    )
    return ProjectionResult(point, t, bregman(f, point, sigma), gap, it, gap <= tol, slacks)


def boundary_distance(x: SpinElement) -> float:
    """Smallest eigenvalue: distance of a state from the cone boundary."""
    return eigenvalues(x)[0]
