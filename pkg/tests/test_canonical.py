import math

import numpy as np
import pytest

from seedsynth.canonical import canonicalize, feature_vector, first_nonzero_index
from seedsynth.linalg import random_unitary


def test_pauli_z_canonical_form():
    c = canonicalize(np.diag([1, -1]))
    assert np.allclose(c.matrix, np.diag([1j, -1j]))


def test_phased_identity_maps_to_identity():
    c = canonicalize(np.exp(1j * math.pi / 7) * np.eye(4))
    assert np.allclose(c.matrix, np.eye(4), atol=1e-14)
    assert c.source_phase == pytest.approx(math.pi / 7)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_phase_invariance(n):
    rng = np.random.default_rng(n)
    for s in range(30):
        u = random_unitary(n, s)
        a = canonicalize(u).matrix
        b = canonicalize(np.exp(1j * rng.uniform(-10, 10)) * u).matrix
        assert np.max(np.abs(a - b)) <= 1e-10


def test_canonical_is_special_and_reconstructs():
    u = random_unitary(3, 11)
    c = canonicalize(u)
    assert np.linalg.det(c.matrix) == pytest.approx(1.0)
    assert np.allclose(np.exp(1j * c.source_phase) * c.matrix, u)


def test_first_entry_argument_in_window():
    for s in range(20):
        m = canonicalize(random_unitary(2, s)).matrix
        i, j = first_nonzero_index(m)
        assert 0 <= np.angle(m[i, j]) % (2 * math.pi) < 2 * math.pi / 4 + 1e-9


def test_zero_leading_entry_uses_next_nonzero():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    assert first_nonzero_index(x) == (0, 1)
    c = canonicalize(1j * x)
    assert np.allclose(c.matrix, canonicalize(x).matrix)


def test_feature_vector_layout():
    m = np.array([[1 + 2j, 3 + 4j], [5 + 6j, 7 + 8j]])
    assert feature_vector(m).tolist() == [1, 2, 3, 4, 5, 6, 7, 8]
    assert feature_vector(canonicalize(random_unitary(3, 0))).shape == (128,)


def test_rejects_non_unitary():
    with pytest.raises(ValueError):
        canonicalize(np.ones((2, 2)))


def test_idempotent():
    for s in range(10):
        c = canonicalize(random_unitary(3, s)).matrix
        assert np.max(np.abs(canonicalize(c).matrix - c)) <= 1e-12


def test_identity_is_canonical():
    assert np.allclose(canonicalize(np.eye(8)).matrix, np.eye(8))


def test_matches_exhaustive_root_of_unity_search():
    # try every N-th root of unity on the SU(N) representative; exactly one
    # lands the first nonzero entry's argument in [0, 2 pi / N)
    for n in (1, 2, 3):
        dim = 1 << n
        for s in range(10):
            u = random_unitary(n, 50 + s)
            su = u / np.linalg.det(u) ** (1 / dim)
            hits = []
            for k in range(dim):
                v = su * np.exp(-2j * math.pi * k / dim)
                i, j = first_nonzero_index(v)
                if np.angle(v[i, j]) % (2 * math.pi) < 2 * math.pi / dim:
                    hits.append(v)
            assert len(hits) == 1
            assert np.max(np.abs(hits[0] - canonicalize(u).matrix)) <= 1e-10
