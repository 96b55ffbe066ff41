"""Instantiation: fit a template's U3 angles to a target unitary.

The objective is the phase-invariant cost ``1 - |Tr(T^dag U(theta))| / N``.
Each call runs a multi-start quasi-Newton descent and bumps every active
call counter once.
"""
from __future__ import annotations

import contextlib
import contextvars
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, cost_and_gradient
from .errors import DimensionError, NumericalError

GRAD_TOL = 1e-10
STALL_WINDOW = 20
STALL_RTOL = 1e-7
MEMORY = 10


class CallCounter:
    """Counts instantiate() invocations made while it is active."""

    def __init__(self):
        self.count = 0

    def __repr__(self):
        return f"CallCounter(count={self.count})"


_active: contextvars.ContextVar[tuple] = contextvars.ContextVar("seedsynth_counters", default=())
TOTAL_CALLS = CallCounter()


@contextlib.contextmanager
def count_calls():
    counter = CallCounter()
    token = _active.set(_active.get() + (counter,))
    try:
        yield counter
    finally:
        _active.reset(token)


def _record_call() -> None:
    TOTAL_CALLS.count += 1
    for c in _active.get():
        c.count += 1


@dataclass(frozen=True)
class InstantiationConfig:
    epsilon: float = 1e-8
    max_restarts: int = 8
    max_iterations: int = 1000
    rng_seed: int = 0
    # keep descending after convergence until sqrt(cost) <= epsilon / sqrt(10)
    polish: bool = True

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_restarts < 1 or self.max_iterations < 1:
            raise ValueError("restart and iteration limits must be positive")

    @property
    def stop_tol(self) -> float:
        return self.epsilon**2 if self.polish else self.epsilon


@dataclass(frozen=True)
class InstantiationResult:
    params: np.ndarray
    cost: float
    converged: bool
    iterations: int
    restarts_used: int
    circuit: Circuit


def _check(cost, grad):
    if not math.isfinite(cost) or not np.all(np.isfinite(grad)):
        raise NumericalError("non-finite cost or gradient")


def minimize(cost_fn, grad_fn, x0, max_iterations: int = 1000, tol: float = 1e-8):
    """Limited-memory quasi-Newton descent with backtracking line search.

    ``grad_fn=None`` means ``cost_fn`` returns ``(cost, grad)``.  Stops when
    the cost drops to ``tol / 10``, the gradient norm to 1e-10, progress
    stalls above ``tol``, or after ``max_iterations``.  Returns
    ``(x, cost, iterations)``.
    """
    if grad_fn is None:
        fg = cost_fn
    else:
        def fg(x):
            return cost_fn(x), grad_fn(x)

    x = np.array(x0, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NumericalError("non-finite starting point")
    f, g = fg(x)
    _check(f, g)
    target = tol / 10.0
    s_hist: deque = deque(maxlen=MEMORY)
    y_hist: deque = deque(maxlen=MEMORY)
    recent: deque = deque([f], maxlen=STALL_WINDOW + 1)
    it = 0
    while it < max_iterations:
        if f <= target or np.linalg.norm(g) <= GRAD_TOL:
            break
        d = _direction(g, s_hist, y_hist)
        slope = float(g @ d)
        if slope >= 0:
            s_hist.clear()
            y_hist.clear()
            d = -g
            slope = -float(g @ g)
        step = 1.0 if s_hist else min(1.0, 1.0 / np.linalg.norm(g))
        accepted = False
        for _ in range(40):
            xn = x + step * d
            fn, gn = fg(xn)
            _check(fn, gn)
            if fn <= f + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if s_hist:
                s_hist.clear()
                y_hist.clear()
                continue
            break
        s, y = xn - x, gn - g
        if float(s @ y) > 1e-16 * float(y @ y):
            s_hist.append(s)
            y_hist.append(y)
        x, f, g = xn, fn, gn
        it += 1
        recent.append(f)
        if f > tol and len(recent) > STALL_WINDOW and recent[0] - f <= STALL_RTOL * f:
            break
    return x, float(f), it


def _direction(g, s_hist, y_hist):
    q = -g.copy()
    alphas = []
    for s, y in zip(reversed(s_hist), reversed(y_hist)):
        rho = 1.0 / float(y @ s)
        a = rho * float(s @ q)
        alphas.append((a, rho, s, y))
        q -= a * y
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= float(s @ y) / float(y @ y)
    for a, rho, s, y in reversed(alphas):
        b = rho * float(y @ q)
        q += (a - b) * s
    return q


def start_points(n_params: int, cfg: InstantiationConfig):
    rng = np.random.default_rng(cfg.rng_seed)
    yield np.zeros(n_params)
    for _ in range(cfg.max_restarts - 1):
        yield rng.uniform(-np.pi, np.pi, n_params)


def instantiate(target, template, cfg: InstantiationConfig | None = None) -> InstantiationResult:
    """Best fit of ``template`` (a Template or Circuit) to ``target`` over restarts.

    Restarts stop early once one converges; ties keep the lowest restart.
    """
    cfg = cfg or InstantiationConfig()
    circ = template if isinstance(template, Circuit) else template.skeleton
    target = np.ascontiguousarray(target, dtype=np.complex128)
    if target.shape != (1 << circ.n_qubits,) * 2:
        raise DimensionError(f"target shape {target.shape} does not match {circ.n_qubits}-qubit template")
    _record_call()

    def fg(p):
        return cost_and_gradient(circ, target, p)

    best = None
    iters = 0
    used = 0
    for x0 in start_points(circ.num_params, cfg):
        used += 1
        x, f, it = minimize(fg, None, x0, cfg.max_iterations, cfg.stop_tol)
        iters += it
        if best is None or f < best[1]:
            best = (x, f)
        if best[1] <= cfg.epsilon:
            break
    x, f = best
    return InstantiationResult(
        params=x,
        cost=f,
        converged=f <= cfg.epsilon,
        iterations=iters,
        restarts_used=used,
        circuit=circ.with_params(x),
    )
