import numpy as np
import pytest
import scipy.linalg

from seedsynth.benchmarks import generate, qft, random_layers, tfim
from seedsynth.circuit import evaluate
from seedsynth.linalg import phase_invariant_distance

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1, -1])
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def dft(n):
    dim = 1 << n
    x = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(x, x) / dim) / np.sqrt(dim)


def on(m, q, n):
    out = np.eye(1)
    for k in range(n):
        out = np.kron(out, m if k == q else np.eye(2))
    return out


def test_qft_width_one_is_hadamard():
    c = qft(1)
    assert len(c.gates) == 1 and c.gates[0].kind == "u3"
    assert np.allclose(evaluate(c), H)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_qft_equals_dft(n):
    assert np.max(np.abs(evaluate(qft(n)) - dft(n))) <= 1e-9


def test_qft_is_nearest_neighbour():
    assert all(abs(g.qubits[0] - g.qubits[1]) == 1 for g in qft(6).gates if g.kind == "cx")


def test_tfim_matches_trotter_oracle():
    n, depth, seed = 4, 3, 5
    rng = np.random.default_rng(seed)
    j, h, dt = rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), rng.uniform(0.05, 0.3)
    u = np.eye(1)
    for _ in range(n):
        u = np.kron(u, H)
    for _ in range(depth):
        for i in range(n - 1):
            u = scipy.linalg.expm(1j * j * dt * on(Z, i, n) @ on(Z, i + 1, n)) @ u
        for q in range(n):
            u = scipy.linalg.expm(-1j * h * dt * on(X, q, n)) @ u
    assert phase_invariant_distance(u, evaluate(tfim(n, depth, seed))) < 1e-12


def test_tfim_scales_with_depth():
    counts = [tfim(5, d).cnot_count for d in (1, 2, 4)]
    assert counts == [8, 16, 32]


def test_random_layers_seeded():
    a, b = random_layers(5, 4, 3), random_layers(5, 4, 3)
    assert a == b
    assert a != random_layers(5, 4, 4)
    assert all(abs(g.qubits[0] - g.qubits[1]) == 1 for g in a.gates if g.kind == "cx")


def test_generate_rejects_bad_input():
    with pytest.raises(ValueError):
        generate("ghz", 3)
    with pytest.raises(ValueError):
        generate("qft", 0)
