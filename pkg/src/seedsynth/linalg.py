"""Dense complex matrix helpers and unitary metrics.

Matrices are plain ``numpy`` complex128 arrays in row-major order.  Qubit 0
is the most significant bit of a basis index (big-endian), a convention
shared by every module in the package.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import DimensionError

UNITARY_TOL = 1e-10
MAX_QUBITS = 8


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix is not square: {m.shape}")
    return m


def num_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def is_unitary(a, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def as_unitary(a, tol: float = UNITARY_TOL) -> np.ndarray:
    """Validate ``a`` as a unitary on a power-of-two dimension.

    Returns a read-only complex128 copy.
    """
    m = _square(a)
    num_qubits(m.shape[0])
    err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
    if err > tol:
        raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {err:.3e})")
    m = m.copy()
    m.flags.writeable = False
    return m


def hs_norm_sq(a) -> float:
    """``Tr(A^dag A)``, the squared Hilbert-Schmidt (Frobenius) norm."""
    m = _square(a)
    return float(np.vdot(m, m).real)


def hs_norm(a) -> float:
    return math.sqrt(hs_norm_sq(a))


def phase_invariant_distance(u, v) -> float:
    """``1 - |Tr(U^dag V)| / N``; zero iff ``V`` equals ``U`` up to global phase.

    Evaluated as ``min_phi ||U - e^{i phi} V||_F^2 / 2N`` (an identity for
    unitaries) so the result keeps relative precision near zero instead of
    bottoming out at machine epsilon.
    """
    u = _square(u)
    v = _square(v)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape} vs {v.shape}")
    dim = u.shape[0]
    t = np.vdot(v, u)
    phase = t / abs(t) if abs(t) > 0 else 1.0
    r = u - phase * v
    return min(1.0, float(np.vdot(r, r).real) / (2.0 * dim))


def hs_distance(u, v) -> float:
    """Phase-minimised Frobenius distance normalised to ``[0, 1]``.

    Equals ``sqrt(phase_invariant_distance(u, v))``.  Unlike the squared
    form it satisfies the triangle inequality, so per-block errors of a
    partitioned circuit add up to a bound on the whole-circuit error.
    """
    return math.sqrt(phase_invariant_distance(u, v))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def random_unitary(n_qubits: int, rng_seed: int) -> np.ndarray:
    """Haar-random unitary on ``n_qubits`` qubits, deterministic per seed."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    rng = np.random.default_rng(rng_seed)
    dim = 1 << n_qubits
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def max_cnots(n_qubits: int) -> int:
    """Worst-case CNOT count for an ``n_qubits`` unitary, ``ceil((4^n - 3n - 1) / 4)``."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return -(-(4**n_qubits - 3 * n_qubits - 1) // 4)


def embed(gate, qubits, n_qubits: int) -> np.ndarray:
    """Dense operator of ``gate`` acting on ``qubits`` (in order) of an ``n_qubits`` register."""
    g = np.asarray(gate, dtype=np.complex128)
    k = len(qubits)
    if g.shape != (1 << k, 1 << k):
        raise DimensionError(f"gate shape {g.shape} does not match {k} qubits")
    rest = [q for q in range(n_qubits) if q not in qubits]
    order = list(qubits) + rest
    full = np.kron(g, np.eye(1 << len(rest)))
    # full acts on qubits in `order`; permute tensor axes back to 0..n-1
    t = full.reshape([2] * (2 * n_qubits))
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n_qubits + i for i in inv])
    return t.reshape(1 << n_qubits, 1 << n_qubits)


def write_matrix(path, m) -> None:
    m = as_matrix(m)
    rows, cols = m.shape
    lines = [f"{rows} {cols}"]
    for row in m:
        lines.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing header")
    rows, cols = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} entries, found {len(body)}")
    return as_matrix(np.array([complex(t) for t in body]).reshape(rows, cols))
