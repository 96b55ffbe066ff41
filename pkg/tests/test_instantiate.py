import numpy as np
import pytest

from seedsynth.circuit import CNOT_MATRIX, evaluate
from seedsynth.instantiate import (
    TOTAL_CALLS,
    InstantiationConfig,
    count_calls,
    instantiate,
    minimize,
    start_points,
)
from seedsynth.linalg import hs_distance, random_unitary


def test_minimize_rosenbrock():
    def fg(x):
        a, b = x
        f = (1 - a) ** 2 + 100 * (b - a * a) ** 2
        g = np.array([-2 * (1 - a) - 400 * a * (b - a * a), 200 * (b - a * a)])
        return f, g

    x, f, it = minimize(fg, None, [-1.2, 1.0], max_iterations=2000, tol=1e-12)
    assert np.allclose(x, [1, 1], atol=1e-5)
    assert f < 1e-12


def test_minimize_separate_gradient():
    x, f, _ = minimize(lambda x: float(x @ x), lambda x: 2 * x, np.ones(4), tol=1e-12)
    assert f < 1e-12


def test_minimize_respects_iteration_cap():
    _, _, it = minimize(lambda x: (float(x @ x), 2 * x), None, np.ones(3) * 5, max_iterations=1, tol=1e-30)
    assert it == 1


def test_self_realizable_targets(line_catalog):
    rng = np.random.default_rng(0)
    for tid in (0, 3, 9, 20):
        t = line_catalog[tid]
        truth = t.skeleton.with_params(rng.uniform(-np.pi, np.pi, t.skeleton.num_params))
        r = instantiate(evaluate(truth), t)
        assert r.converged and r.cost <= 1e-8
        assert hs_distance(evaluate(r.circuit), evaluate(truth)) <= 1e-8


def test_polish_drives_cost_far_below_epsilon(line_catalog):
    rng = np.random.default_rng(1)
    t = line_catalog[10]
    target = evaluate(t.skeleton.with_params(rng.uniform(-3, 3, t.skeleton.num_params)))
    r = instantiate(target, t, InstantiationConfig(epsilon=1e-8))
    assert r.cost <= 1e-16


def test_unreachable_target_uses_all_restarts(two_qubit_catalog):
    cfg = InstantiationConfig(max_restarts=3)
    r = instantiate(CNOT_MATRIX, two_qubit_catalog.root, cfg)
    assert not r.converged
    assert r.restarts_used == 3
    assert r.cost > 0.1


def test_deterministic_per_seed(line_catalog):
    target = random_unitary(3, 4)
    a = instantiate(target, line_catalog[5], InstantiationConfig(rng_seed=3, max_restarts=2))
    b = instantiate(target, line_catalog[5], InstantiationConfig(rng_seed=3, max_restarts=2))
    assert np.array_equal(a.params, b.params)


def test_start_points():
    pts = list(start_points(6, InstantiationConfig(max_restarts=4, rng_seed=9)))
    assert len(pts) == 4
    assert np.array_equal(pts[0], np.zeros(6))
    assert all(np.all(np.abs(p) <= np.pi) for p in pts)


def test_call_counting_nests(line_catalog):
    target = np.eye(8)
    before = TOTAL_CALLS.count
    with count_calls() as outer:
        instantiate(target, line_catalog.root)
        with count_calls() as inner:
            instantiate(target, line_catalog.root)
    assert (outer.count, inner.count) == (2, 1)
    assert TOTAL_CALLS.count - before == 2


def test_config_validation():
    with pytest.raises(ValueError):
        InstantiationConfig(epsilon=0)
    with pytest.raises(ValueError):
        InstantiationConfig(max_restarts=0)


def test_wrong_target_shape(line_catalog):
    with pytest.raises(ValueError):
        instantiate(np.eye(4), line_catalog.root)


def test_toffoli_not_reachable_from_root(line_catalog):
    toffoli = np.eye(8)[[0, 1, 2, 3, 4, 5, 7, 6]]
    r = instantiate(toffoli, line_catalog.root)
    assert not r.converged and r.restarts_used == 8


def test_reported_cost_below_every_start(line_catalog):
    from seedsynth.circuit import cost

    t = line_catalog[6]
    target = random_unitary(3, 8)
    cfg = InstantiationConfig(max_restarts=3, rng_seed=2)
    r = instantiate(target, t, cfg)
    for x0 in start_points(t.skeleton.num_params, cfg):
        assert r.cost <= cost(t.skeleton, target, x0)


def test_minimize_never_increases_cost():
    seen = []

    def fg(x):
        f = float(np.sum(np.sin(x) ** 2 + 0.1 * x**2))
        seen.append(f)
        return f, 2 * np.sin(x) * np.cos(x) + 0.2 * x

    x0 = np.linspace(-2, 2, 5)
    _, f, _ = minimize(fg, None, x0)
    assert f <= seen[0]
