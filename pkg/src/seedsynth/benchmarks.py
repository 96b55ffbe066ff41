"""Desk-scale benchmark circuits in the U3 + CNOT gate set."""
from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, Gate, cx, u3

FAMILIES = ("qft", "tfim", "random_layers")


class _Builder:
    def __init__(self, n: int):
        self.n = n
        self.gates: list[Gate] = []
        self.params: list[float] = []

    def u3(self, q, theta, phi, lam):
        self.gates.append(u3(q))
        self.params += [theta, phi, lam]

    def h(self, q):
        self.u3(q, math.pi / 2, 0.0, math.pi)

    def p(self, q, lam):
        self.u3(q, 0.0, 0.0, lam)

    def rx(self, q, theta):
        self.u3(q, theta, -math.pi / 2, math.pi / 2)

    def cx(self, c, t):
        self.gates.append(cx(c, t))

    def cp(self, c, t, lam):
        self.p(c, lam / 2)
        self.cx(c, t)
        self.p(t, -lam / 2)
        self.cx(c, t)
        self.p(t, lam / 2)

    def swap(self, a, b):
        self.cx(a, b)
        self.cx(b, a)
        self.cx(a, b)

    def build(self) -> Circuit:
        return Circuit(self.n, self.gates, np.array(self.params))


def qft(width: int) -> Circuit:
    """Quantum Fourier transform on a nearest-neighbour line.

    Each logical qubit is swapped rightwards past the qubits it couples to,
    so every two-qubit gate acts on adjacent wires and the final wire order
    is already bit-reversed: the circuit equals the DFT matrix
    ``F[x, y] = e^{2 pi i x y / N} / sqrt(N)`` exactly.
    """
    b = _Builder(width)
    for j in range(width):
        b.h(0)
        for m in range(1, width - j):
            b.cp(m - 1, m, math.pi / 2**m)
            b.swap(m - 1, m)
    return b.build()


def tfim(width: int, depth: int = 3, seed: int = 0) -> Circuit:
    """Trotterised transverse-field Ising evolution with seeded couplings.

    Single-qubit layers are scheduled next to the ZZ terms that touch the
    same wire (they commute with everything else), so the gate list sweeps
    along the line instead of alternating full layers.
    """
    rng = np.random.default_rng(seed)
    coupling, field, dt = rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), rng.uniform(0.05, 0.3)
    b = _Builder(width)
    b.h(0)
    for step in range(depth):
        for i in range(width - 1):
            if step == 0:
                b.h(i + 1)
            b.cx(i, i + 1)
            b.p(i + 1, -2 * coupling * dt)
            b.cx(i, i + 1)
            b.rx(i, 2 * field * dt)
        b.rx(width - 1, 2 * field * dt)
    if depth == 0:
        for q in range(1, width):
            b.h(q)
    return b.build()


def random_layers(width: int, depth: int = 4, seed: int = 0) -> Circuit:
    """Random U3 + nearest-neighbour CNOT layers.

    Each layer picks a random window of three adjacent wires and applies
    two or three CNOTs on its edges, each followed by random U3s on the
    touched wires.  Every wire starts with a random U3, emitted just
    before the wire is first used.
    """
    rng = np.random.default_rng(seed)
    b = _Builder(width)
    opening = rng.uniform(-math.pi, math.pi, (width, 3))
    fresh = set(range(width))

    def touch(q):
        if q in fresh:
            fresh.discard(q)
            b.u3(q, *opening[q])

    span = min(width, 3)
    for _ in range(depth):
        if span < 2:
            break
        s = int(rng.integers(0, width - span + 1))
        for _ in range(int(rng.integers(2, 4))):
            i = s + int(rng.integers(0, span - 1))
            c, t = (i, i + 1) if rng.random() < 0.5 else (i + 1, i)
            touch(c)
            touch(t)
            b.cx(c, t)
            b.u3(c, *rng.uniform(-math.pi, math.pi, 3))
            b.u3(t, *rng.uniform(-math.pi, math.pi, 3))
    for q in sorted(fresh):
        touch(q)
    return b.build()


def generate(family: str, width: int, depth: int = 3, seed: int = 0) -> Circuit:
    if width < 1 or width > 16:
        raise ValueError(f"unsupported width {width}")
    if family == "qft":
        return qft(width)
    if family == "tfim":
        return tfim(width, depth, seed)
    if family == "random_layers":
        return random_layers(width, depth, seed)
    raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
