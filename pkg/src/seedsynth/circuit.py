"""U3 + CNOT circuit model, unitary evaluation and analytic gradients."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DimensionError
from .linalg import as_unitary

U3 = "u3"
CX = "cx"


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind == U3:
            if len(self.qubits) != 1:
                raise ValueError("u3 acts on exactly one qubit")
        elif self.kind == CX:
            if len(self.qubits) != 2:
                raise ValueError("cx acts on exactly two qubits")
            if self.qubits[0] == self.qubits[1]:
                raise ValueError(f"cx control equals target ({self.qubits[0]})")
        else:
            raise ValueError(f"unsupported gate kind {self.kind!r}")
        if min(self.qubits) < 0:
            raise ValueError("negative qubit index")

    @property
    def num_params(self) -> int:
        return 3 if self.kind == U3 else 0


def u3(q: int) -> Gate:
    return Gate(U3, (q,))


def cx(control: int, target: int) -> Gate:
    return Gate(CX, (control, target))


@dataclass(frozen=True)
class QubitTopology:
    n_qubits: int
    edges: frozenset

    def __init__(self, n_qubits: int, edges: Iterable[Sequence[int]]):
        norm = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop on qubit {a}")
            if not (0 <= a < n_qubits and 0 <= b < n_qubits):
                raise ValueError(f"edge ({a}, {b}) outside {n_qubits} qubits")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def line(cls, order: Sequence[int]) -> "QubitTopology":
        """Linear chain visiting qubits in ``order``, e.g. ``(0, 2, 1)``."""
        return cls(len(order), zip(order, order[1:]))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True, eq=False)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    params: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        p = np.array(self.params, dtype=np.float64).ravel()
        p.flags.writeable = False
        object.__setattr__(self, "params", p)
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise ValueError(f"gate {g} outside {self.n_qubits}-qubit register")
        if p.size != self.num_params:
            raise ValueError(f"expected {self.num_params} parameters, got {p.size}")

    @classmethod
    def skeleton(cls, n_qubits: int, gates: Iterable[Gate]) -> "Circuit":
        gates = tuple(gates)
        return cls(n_qubits, gates, np.zeros(sum(g.num_params for g in gates)))

    @property
    def num_params(self) -> int:
        return sum(g.num_params for g in self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(g.kind == CX for g in self.gates)

    @cached_property
    def ops(self) -> np.ndarray:
        """Kernel gate program: rows ``(kind, q0, q1, param_offset)``."""
        rows, off = [], 0
        for g in self.gates:
            if g.kind == U3:
                rows.append((0, g.qubits[0], 0, off))
                off += 3
            else:
                rows.append((1, g.qubits[0], g.qubits[1], 0))
        return np.array(rows, dtype=np.int64).reshape(-1, 4)

    def param_offsets(self) -> list[int]:
        return [int(o) for o in self.ops[:, 3]]

    def with_params(self, params) -> "Circuit":
        return Circuit(self.n_qubits, self.gates, params)

    def append(self, gate: Gate, params=()) -> "Circuit":
        p = np.asarray(params, dtype=np.float64)
        if p.size == 0 and gate.num_params:
            p = np.zeros(gate.num_params)
        return Circuit(self.n_qubits, self.gates + (gate,), np.concatenate([self.params, p]))

    def structure(self) -> tuple:
        return (self.n_qubits, self.gates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.structure() == other.structure() and np.array_equal(self.params, other.params)

    def __hash__(self):
        return hash((self.structure(), self.params.tobytes()))

    def __repr__(self) -> str:
        return f"Circuit(n_qubits={self.n_qubits}, gates={len(self.gates)}, cnots={self.cnot_count})"


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ]
    )


CNOT_MATRIX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)


def evaluate(c: Circuit, params=None) -> np.ndarray:
    """Unitary of ``c``; gate ``i`` acts before gate ``i + 1``."""
    p = c.params if params is None else np.ascontiguousarray(params, dtype=np.float64)
    if p.size != c.num_params:
        raise ValueError(f"expected {c.num_params} parameters, got {p.size}")
    return kernels.unitary(c.n_qubits, c.ops, p)


def _target(c: Circuit, target) -> np.ndarray:
    t = np.ascontiguousarray(target, dtype=np.complex128)
    if t.shape != (1 << c.n_qubits,) * 2:
        raise DimensionError(f"target shape {t.shape} does not match {c.n_qubits} qubits")
    return t


def cost_and_gradient(c: Circuit, target, params=None) -> tuple[float, np.ndarray]:
    """Phase-invariant cost ``1 - |Tr(T^dag U)| / N`` and its gradient."""
    p = c.params if params is None else np.ascontiguousarray(params, dtype=np.float64)
    if p.size != c.num_params:
        raise ValueError(f"expected {c.num_params} parameters, got {p.size}")
    return kernels.cost_grad(c.n_qubits, c.ops, p, _target(c, target))


def gradient(c: Circuit, target, params=None) -> np.ndarray:
    return cost_and_gradient(c, target, params)[1]


def cost(c: Circuit, target, params=None) -> float:
    return cost_and_gradient(c, target, params)[0]


def remap(c: Circuit, mapping: Sequence[int], n_qubits: int) -> Circuit:
    """Relabel qubit ``q`` of ``c`` as ``mapping[q]`` in an ``n_qubits`` register."""
    gates = [Gate(g.kind, tuple(mapping[q] for q in g.qubits)) for g in c.gates]
    return Circuit(n_qubits, gates, c.params)


def concatenate(circuits: Sequence[Circuit]) -> Circuit:
    if not circuits:
        raise ValueError("nothing to concatenate")
    n = circuits[0].n_qubits
    if any(c.n_qubits != n for c in circuits):
        raise DimensionError("circuit widths differ")
    gates = tuple(g for c in circuits for g in c.gates)
    return Circuit(n, gates, np.concatenate([c.params for c in circuits]))


def gate_unitary(g: Gate, params=()) -> np.ndarray:
    if g.kind == U3:
        return u3_matrix(*params)
    return CNOT_MATRIX.copy()


def check_unitary(c: Circuit) -> np.ndarray:
    return as_unitary(evaluate(c))
