
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinfactor.algebra import SpinElement, center, random_state
from spinfactor.channels import Channel, dilation, random_orthogonal
from spinfactor.divergence import bregman, e_lambda, quadratic, shannon, shifted_generator, tsallis
from spinfactor.monotonicity import (
    critical_alpha,
    critical_gap,
    dilation_criterion,
    dilation_violation_search,
    empirical_monotonicity,
    equality_set_probe,
    interval_bregman,
    log_grid,
    run_trial,
    sample_trial,
    sign_expression_minimizer,
    tsallis_classification,
    tsallis_sign_expression,
)


def interval_curvature_derivative_sign(alpha, y):
    """Sign of d/dy [y^2 F''(y)] for the Tsallis interval potential, by direct differentiation."""
    # y^2 F'' = alpha (y^alpha + y^2 (1 - y)^(alpha - 2))
    d = alpha * (alpha * y ** (alpha - 1) + 2 * y * (1 - y) ** (alpha - 2) - (alpha - 2) * y**2 * (1 - y) ** (alpha - 3))
    return np.sign(d)


def test_sign_expression_examples():
    assert tsallis_sign_expression(4.0, 0.5) == pytest.approx(3.5)
    z = np.array([1e-3, 0.5, 1.0, 7.0])
    np.testing.assert_allclose(tsallis_sign_expression(2.0, z), 4.0)
    assert tsallis_sign_expression(2.5, 1e-12) < -1e4
    with pytest.raises(ValueError):
        tsallis_sign_expression(2.0, 0.0)


@given(st.floats(0.2, 9.0), st.floats(1e-3, 0.999))
def test_sign_expression_has_the_sign_of_the_derivative(alpha, y):
    z = 1.0 / y - 1.0
    direct = interval_curvature_derivative_sign(alpha, y)
    expr = tsallis_sign_expression(alpha, z)
    if abs(expr) > 1e-9:
        assert np.sign(expr) == direct


def test_critical_alpha():
    a = critical_alpha()
    assert a == pytest.approx(6.43779, abs=1e-3)
    assert abs(critical_gap(a)) <= 1e-10
    assert critical_gap(3.0) == 2.0
    assert critical_gap(7.0) == pytest.approx(-9.0)
    assert abs(critical_gap(critical_alpha(tol=1e-12))) <= 1e-12


@given(st.floats(3.01, 9.0))
def test_minimizer_is_stationary(alpha):
    z = sign_expression_minimizer(alpha)
    h = 1e-6 * max(z, 1e-3)
    deriv = (tsallis_sign_expression(alpha, z + h) - tsallis_sign_expression(alpha, z - h)) / (2 * h)
    assert abs(deriv) <= 1e-5 * max(1.0, abs(alpha))
    assert tsallis_sign_expression(alpha, z) == pytest.approx(critical_gap(alpha), rel=1e-12, abs=1e-12)
    grid = np.geomspace(1e-4, 1e3, 400)
    assert np.all(tsallis_sign_expression(alpha, grid) >= critical_gap(alpha) - 1e-9)


def test_classification_examples():
    assert tsallis_classification(1.5).monotone
    assert not tsallis_classification(2.5).monotone
    assert tsallis_classification(3.0).monotone
    assert tsallis_classification(critical_alpha()).monotone
    assert not tsallis_classification(7.0).monotone


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0, 2.5, 2.9, 3.0, 4.0, 6.0, 6.4, 6.5, 7.0])
def test_criterion_agrees_with_classification(alpha):
    assert dilation_criterion(tsallis(alpha)).monotone == tsallis_classification(alpha).monotone


def test_criterion_examples():
    assert dilation_criterion(shannon()).monotone
    assert dilation_criterion(quadratic()).monotone
    res = dilation_criterion(tsallis(2.5))
    assert not res.monotone
    y1, y2 = res.witness
    assert 0.9 < y1 < y2 < 1.0


@pytest.mark.parametrize("f", [shannon(), quadratic(), e_lambda(1.0), tsallis(1.5), tsallis(4.0)], ids=lambda g: g.spec.__repr__())
def test_search_finds_nothing_when_criterion_holds(f):
    assert dilation_criterion(f).monotone
    assert dilation_violation_search(f) is None


@pytest.mark.parametrize("alpha", [2.5, 6.5, 7.0])
def test_search_finds_and_replays_witness(alpha):
    f = tsallis(alpha)
    w = dilation_violation_search(f)
    assert w is not None and w.excess > 1e-9
    before, after = w.replay(f)
    assert after - before == pytest.approx(w.excess, rel=1e-6)
    assert dilation_violation_search(f) == w


def test_interval_bregman_matches_spin_factor():
    f = tsallis(2.5)
    x, y = 0.8, 0.3
    spin = bregman(f, SpinElement([x - 0.5], 0.5), SpinElement([y - 0.5], 0.5))
    assert float(interval_bregman(f, x, y)) == pytest.approx(spin, abs=1e-14)


def test_log_grid():
    g = log_grid(100)
    assert np.all(np.diff(g) > 0) and g[0] > 0 and g[-1] < 1
    assert g[0] == pytest.approx(1e-8)


def test_empirical_shannon_is_clean():
    rep = empirical_monotonicity(shannon(), 3, 300, seed=1)
    assert rep.clean and rep.max_excess == 0.0


def test_empirical_tsallis_dilations_find_violations_and_replay():
    rep = empirical_monotonicity(tsallis(2.5), 1, 2000, seed=0, dilations_only=True)
    assert rep.violations
    for v in rep.violations[:5]:
        assert v.excess > rep.tol
        again = run_trial(tsallis(2.5), 1, 0, v.trial, dilations_only=True)
        assert again.d_before == v.d_before and again.d_after == v.d_after
    assert rep.max_excess == max(v.excess for v in rep.violations)


def test_trials_are_pure_functions_of_seed_and_index():
    a = sample_trial(3, 11, 5)
    b = sample_trial(3, 11, 5)
    assert a[0].distance(b[0]) == 0 and a[1].max_abs_diff(b[1]) == 0 and a[2].max_abs_diff(b[2]) == 0


@pytest.mark.parametrize("f", [shannon(), e_lambda(1.0), quadratic()], ids=lambda g: g.name)
def test_reduction_consistency(f):
    status = {d: empirical_monotonicity(f, d, 300, seed=3).clean for d in (2, 3, 5)}
    assert len(set(status.values())) == 1


@pytest.mark.parametrize("r", [0.25, 0.5, 0.9])
def test_shifted_generators_stay_monotone(r):
    assert empirical_monotonicity(shannon(), 2, 200, seed=4).clean
    assert empirical_monotonicity(shifted_generator(shannon(), r), 2, 200, seed=4).clean


def test_equality_set_under_rotation():
    rng = np.random.default_rng(2)
    phi = Channel(random_orthogonal(rng, 3), np.zeros(3))
    sigma = random_state(rng, 3, 0.4)
    rep = equality_set_probe(shannon(), phi, sigma, samples=40)
    assert rep.equal.all()
    assert rep.midpoint_failures == 0 and rep.midpoint_checks > 0
    assert rep.recovers


def test_equality_set_under_strict_contraction():
    phi = dilation(center(2), 0.5)
    sigma = random_state(np.random.default_rng(6), 2, 0.4)
    rep = equality_set_probe(shannon(), phi, sigma, samples=60)
    assert rep.equal[0]
    assert len(rep.equality_states) == 1
    assert rep.recovers  # the anchor itself is always recovered


@given(st.integers(0, 2**32 - 1))
def test_equality_set_is_convex(seed):
    # a channel that is an isometry on the e1 axis and contracts the rest
    phi = Channel(np.diag([1.0, 0.3]), np.zeros(2))
    sigma = SpinElement([0.1, 0.0], 0.5)
    rep = equality_set_probe(quadratic(), phi, sigma, samples=30, seed=seed)
    assert rep.midpoint_failures == 0
