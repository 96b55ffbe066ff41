"""Global-phase canonical form of unitaries.

Every unitary ``U`` is mapped to a special unitary ``U*`` that depends only
on the ray ``{e^{i t} U}``:

1. divide by the principal ``N``-th root of ``det(U)`` to land in SU(N);
   this fixes the phase up to an ``N``-th root of unity;
2. multiply by the root of unity ``e^{-2 pi i k / N}`` that brings the
   argument of the first nonzero entry (row-major) into ``[0, 2 pi / N)``.

Exact cancellation of the first entry's phase is generally impossible
while keeping ``det = 1``; the half-open window picks a unique ``k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_unitary

NONZERO_TOL = 1e-8
WINDOW_SNAP = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CanonicalUnitary:
    matrix: np.ndarray
    source_phase: float  # radians; U = e^{i source_phase} * matrix


def first_nonzero_index(m, tol: float = NONZERO_TOL) -> tuple[int, int]:
    a = as_matrix(m)
    hits = np.flatnonzero(np.abs(a).ravel() > tol)
    if hits.size == 0:
        raise ValueError("matrix has no entry above tolerance")
    return divmod(int(hits[0]), a.shape[1])


def _window_k(arg: float, dim: int) -> int:
    # k with (arg - 2 pi k / N) mod 2 pi in [0, 2 pi / N); arguments within
    # WINDOW_SNAP of a window edge snap to the upper window so rounding
    # noise cannot flip k
    k = math.floor((arg % TWO_PI) * dim / TWO_PI + WINDOW_SNAP) % dim
    return int(k)


def canonicalize(u) -> CanonicalUnitary:
    m = as_unitary(u, tol=1e-8)
    dim = m.shape[0]
    sign, logdet = np.linalg.slogdet(m)
    det_phase = float(np.angle(sign))
    # logdet is ~0 for unitaries; only the phase part matters
    phase = det_phase / dim
    v = m * np.exp(-1j * phase)
    i, j = first_nonzero_index(v)
    k = _window_k(float(np.angle(v[i, j])), dim)
    shift = TWO_PI * k / dim
    out = v * np.exp(-1j * shift)
    total = (phase + shift + math.pi) % TWO_PI - math.pi
    out.flags.writeable = False
    return CanonicalUnitary(matrix=out, source_phase=total)


def feature_vector(c) -> np.ndarray:
    """Interleaved real/imag parts, row-major: ``[Re u00, Im u00, Re u01, ...]``."""
    m = c.matrix if isinstance(c, CanonicalUnitary) else np.asarray(c)
    return np.column_stack([m.real.ravel(), m.imag.ravel()]).ravel()
