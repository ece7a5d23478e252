import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinfactor.algebra import SpinElement, center, pure_state, random_state
from spinfactor.capacity import (
    bregman_project,
    capacity_closed_form,
    capacity_finite,
    minimax_inequalities_check,
    objective,
)
from spinfactor.divergence import barycenter, bregman, e_lambda, quadratic, shannon, tsallis
from spinfactor.errors import ConvergenceError

from conftest import seeds

LN2 = math.log(2.0)


def disc_states(n, phase=0.0):
    return [pure_state([math.cos(phase + 2 * math.pi * k / n), math.sin(phase + 2 * math.pi * k / n)]) for k in range(n)]


@pytest.mark.parametrize("d", [1, 2, 3, 7])
def test_closed_form_values(d):
    res = capacity_closed_form(shannon(), d)
    assert res.value == pytest.approx(LN2, abs=1e-12)
    assert res.optimizer.allclose(center(d), 0) and res.gap == 0.0
    assert capacity_closed_form(quadratic(), d).value == pytest.approx(0.5, abs=1e-15)
    assert capacity_closed_form(tsallis(2.0), d).value == pytest.approx(0.5, abs=1e-14)


def test_closed_form_is_rotation_invariant():
    rng = np.random.default_rng(0)
    for _ in range(5):
        u = rng.standard_normal(3)
        rho = pure_state(u / np.linalg.norm(u))
        assert bregman(shannon(), rho, center(3)) == pytest.approx(LN2, abs=1e-12)


def test_single_state():
    rho = random_state(np.random.default_rng(1), 3)
    res = capacity_finite(shannon(), [rho])
    assert res.value == 0.0 and res.gap == 0.0 and res.converged
    np.testing.assert_array_equal(res.weights, [1.0])
    rep = minimax_inequalities_check(shannon(), res, res.weights, res.optimizer)
    assert rep.redundancy_slack == 0.0 and rep.maxred_slack == 0.0


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_symmetric_pure_states_reach_ball_capacity(n):
    res = capacity_finite(shannon(), disc_states(n, 0.3))
    assert res.converged and res.gap <= 1e-7
    assert res.value == pytest.approx(LN2, abs=1e-7)
    assert np.linalg.norm(res.optimizer.v) <= 1e-5
    np.testing.assert_allclose(res.weights, 1.0 / n, atol=1e-6)


def test_antipodal_in_higher_dimension():
    e = np.eye(4)[2]
    res = capacity_finite(shannon(), [pure_state(e), pure_state(-e)])
    assert res.value == pytest.approx(LN2, abs=1e-12)
    np.testing.assert_allclose(res.weights, [0.5, 0.5], atol=1e-12)


def test_duplicate_states_tie_break_to_lowest_index():
    rho, sigma = pure_state([1.0, 0.0]), pure_state([-1.0, 0.0])
    a = capacity_finite(shannon(), [rho, rho, sigma])
    b = capacity_finite(shannon(), [rho, rho, sigma])
    np.testing.assert_array_equal(a.weights, b.weights)
    assert a.value == pytest.approx(LN2, abs=1e-7)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        capacity_finite(shannon(), [])
    with pytest.raises(ValueError):
        capacity_finite(shannon(), [center(2), center(3)])


@settings(max_examples=25)
@given(st.integers(2, 6), st.integers(1, 4), seeds)
def test_solver_invariants(n, d, seed):
    rng = np.random.default_rng(seed)
    states = [random_state(rng, d) for _ in range(n)]
    f = shannon()
    res = capacity_finite(f, states, record_history=True)
    assert res.gap >= 0 and res.converged and res.gap <= 1e-7
    assert abs(res.weights.sum() - 1.0) <= 1e-12 and np.all(res.weights >= 0)
    assert res.optimizer.max_abs_diff(barycenter(res.weights, states)) <= 1e-10
    gaps = [g for _, g in res.history]
    assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    # the Bregman equation turns J into the mixed divergence
    mixed = sum(t * bregman(f, x, res.optimizer) for t, x in zip(res.weights, states) if t > 0)
    assert res.value == pytest.approx(mixed, abs=1e-11)
    assert objective(f, res.weights, states) == pytest.approx(res.value, abs=1e-12)


@pytest.mark.parametrize("f", [shannon(), quadratic(), e_lambda(1.0), tsallis(1.5)], ids=lambda g: g.name)
def test_objective_identity_along_iterates(f):
    rng = np.random.default_rng(9)
    states = [random_state(rng, 3) for _ in range(5)]
    weights = [rng.dirichlet(np.ones(5)) for _ in range(20)]
    for t in weights:
        bar = barycenter(t, states)
        mixed = sum(ti * bregman(f, x, bar) for ti, x in zip(t, states))
        assert objective(f, t, states) == pytest.approx(mixed, abs=1e-11)


@pytest.mark.parametrize("f", [shannon(), quadratic(), tsallis(1.5)], ids=lambda g: g.name)
def test_minimax_inequalities(f):
    rng = np.random.default_rng(12)
    states = [random_state(rng, 2) for _ in range(4)]
    res = capacity_finite(f, states, tol=1e-10)
    at_opt = minimax_inequalities_check(f, res, res.weights, res.optimizer)
    assert at_opt.ok
    assert -1e-8 <= at_opt.redundancy_slack <= res.gap + 1e-9
    assert -1e-8 <= at_opt.maxred_slack <= res.gap + 1e-9
    for _ in range(50):
        sigma = random_state(rng, 2, 0.49)
        t = rng.dirichlet(np.ones(4))
        assert minimax_inequalities_check(f, res, res.weights, sigma).maxred_slack >= -1e-8
        assert minimax_inequalities_check(f, res, t, sigma).redundancy_slack >= -1e-8


def test_projection_of_interior_point_is_itself():
    rng = np.random.default_rng(3)
    poly = [random_state(rng, 2) for _ in range(4)]
    sigma = barycenter(rng.dirichlet(np.ones(4)), poly)
    res = bregman_project(shannon(), sigma, poly)
    assert res.point.max_abs_diff(sigma) <= 1e-6
    assert res.value <= 1e-12
    np.testing.assert_allclose(res.slacks, 0.0, atol=1e-8)


def test_projection_onto_segment_hits_midpoint():
    seg = [pure_state([0.6, 0.8]), pure_state([0.6, -0.8])]
    res = bregman_project(shannon(), center(2), seg)
    assert res.point.allclose(SpinElement([0.3, 0.0], 0.5), 1e-8)
    assert np.all(res.slacks >= -1e-8)


def test_quadratic_projection_is_euclidean():
    # nearest point of a triangle to an outside point, by brute-force least squares
    poly = [SpinElement([0.1, 0.1], 0.5), SpinElement([0.3, 0.0], 0.5), SpinElement([0.2, 0.3], 0.5)]
    sigma = SpinElement([-0.3, -0.2], 0.5)
    res = bregman_project(quadratic(), sigma, poly)
    V = np.array([p.v for p in poly])
    best, best_d = None, math.inf
    for a in np.linspace(0, 1, 401):
        for b in np.linspace(0, 1 - a, max(2, int(401 * (1 - a)))):
            w = np.array([a, b, 1 - a - b])
            x = w @ V
            dist = np.sum((x - sigma.v) ** 2)
            if dist < best_d:
                best, best_d = x, dist
    # refine exactly: the answer lies on an edge or a vertex
    cands = list(V)
    for i in range(3):
        for j in range(i + 1, 3):
            e = V[j] - V[i]
            lam = np.clip((sigma.v - V[i]) @ e / (e @ e), 0, 1)
            cands.append(V[i] + lam * e)
    exact = min(cands, key=lambda x: np.sum((x - sigma.v) ** 2))
    assert np.linalg.norm(exact - best) <= 5e-3
    assert np.linalg.norm(res.point.v - exact) <= 1e-8


def test_pythagorean_certificate_on_random_hull_points():
    rng = np.random.default_rng(21)
    poly = [random_state(rng, 3) for _ in range(4)]
    sigma = random_state(rng, 3, 0.45)
    f = shannon()
    res = bregman_project(f, sigma, poly)
    assert res.converged and np.all(res.slacks >= -1e-8)
    for _ in range(100):
        rho = barycenter(rng.dirichlet(np.ones(4)), poly)
        assert res.pythagorean_slack(f, rho, sigma) >= -1e-8


def test_projection_requires_finite_gradient_at_sigma():
    with pytest.raises(ConvergenceError):
        bregman_project(shannon(), pure_state([1.0, 0.0]), [center(2)])
