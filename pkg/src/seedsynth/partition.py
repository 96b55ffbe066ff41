"""Partition wide circuits into contiguous blocks of at most ``w`` qubits.

Blocks are synthesized independently and spliced back.  Because the
normalised phase-minimised Frobenius distance is unitarily invariant and
obeys the triangle inequality, the whole-circuit error is at most the sum
of per-block errors; :func:`verify_bound` reports both.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from .circuit import Circuit, Gate, evaluate
from .errors import DimensionError
from .linalg import MAX_QUBITS, hs_distance


@dataclass(frozen=True, eq=False)
class Block:
    qubit_subset: tuple[int, ...]
    gates: tuple[Gate, ...]
    params: np.ndarray
    span: tuple[int, int]  # gate index range [start, end) in the source

    @cached_property
    def local_circuit(self) -> Circuit:
        pos = {q: i for i, q in enumerate(self.qubit_subset)}
        gates = [Gate(g.kind, tuple(pos[q] for q in g.qubits)) for g in self.gates]
        return Circuit(len(self.qubit_subset), gates, self.params)

    @cached_property
    def local_unitary(self) -> np.ndarray:
        return evaluate(self.local_circuit)

    @property
    def cnot_count(self) -> int:
        return self.local_circuit.cnot_count

    @property
    def width(self) -> int:
        return len(self.qubit_subset)


@dataclass(frozen=True, eq=False)
class PartitionedCircuit:
    source: Circuit
    blocks: tuple[Block, ...]
    w: int = 3

    def report(self) -> list[dict]:
        return [
            {"block_index": i, "qubits": list(b.qubit_subset),
             "gate_count": len(b.gates), "cnot_count": b.cnot_count}
            for i, b in enumerate(self.blocks)
        ]

    def write_report(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.report(), fh, indent=1)


@dataclass(frozen=True, eq=False)
class AssembledCircuit(Circuit):
    """A reassembled circuit remembering which gate range came from which block."""

    spans: tuple[tuple[int, int], ...] = field(default=())


def _make_block(c: Circuit, offsets, start: int, end: int, qubits) -> Block:
    gates = c.gates[start:end]
    idx = [j for k in range(start, end) if gates[k - start].num_params
           for j in range(offsets[k], offsets[k] + 3)]
    return Block(tuple(sorted(qubits)), gates, c.params[idx], (start, end))


def partition(c: Circuit, w: int = 3) -> PartitionedCircuit:
    """Greedy left-to-right scan; a gate joins the open block while the
    block's qubit set stays within ``w``, otherwise it opens a new block."""
    if w < 1:
        raise ValueError("partition width must be >= 1")
    if c.n_qubits < w:
        raise ValueError(f"circuit width {c.n_qubits} is below partition width {w}")
    offsets = c.param_offsets()
    blocks: list[Block] = []
    active: set[int] = set()
    start = 0
    for k, g in enumerate(c.gates):
        if len(g.qubits) > w:
            raise ValueError(f"gate {g} is wider than partition width {w}")
        if active and len(active | set(g.qubits)) > w:
            blocks.append(_make_block(c, offsets, start, k, active))
            active, start = set(), k
        active |= set(g.qubits)
    if active:
        blocks.append(_make_block(c, offsets, start, len(c.gates), active))
    return PartitionedCircuit(c, tuple(blocks), w)


def pad_blocks(p: PartitionedCircuit, width: int | None = None) -> PartitionedCircuit:
    """Widen blocks narrower than ``width`` with idle neighbouring qubits."""
    width = width or p.w
    if width > p.source.n_qubits:
        raise ValueError("padding width exceeds circuit width")
    out = []
    for b in p.blocks:
        if b.width >= width:
            out.append(b)
            continue
        subset = set(b.qubit_subset)
        spare = sorted(
            (q for q in range(p.source.n_qubits) if q not in subset),
            key=lambda q: (min(abs(q - s) for s in subset), q),
        )
        subset |= set(spare[: width - b.width])
        out.append(Block(tuple(sorted(subset)), b.gates, b.params, b.span))
    return PartitionedCircuit(p.source, tuple(out), p.w)


def reassemble(p: PartitionedCircuit, replacements: Mapping[int, Circuit] | None = None) -> AssembledCircuit:
    replacements = replacements or {}
    gates: list[Gate] = []
    params: list[np.ndarray] = []
    spans = []
    for i, b in enumerate(p.blocks):
        start = len(gates)
        if i in replacements:
            r = replacements[i]
            if r.n_qubits != b.width:
                raise DimensionError(f"replacement for block {i} has width {r.n_qubits}, expected {b.width}")
            gates += [Gate(g.kind, tuple(b.qubit_subset[q] for q in g.qubits)) for g in r.gates]
            params.append(r.params)
        else:
            gates += b.gates
            params.append(b.params)
        spans.append((start, len(gates)))
    for i in replacements:
        if not 0 <= i < len(p.blocks):
            raise KeyError(f"no block {i}")
    flat = np.concatenate(params) if params else np.zeros(0)
    return AssembledCircuit(p.source.n_qubits, tuple(gates), flat, spans=tuple(spans))


@dataclass(frozen=True)
class BoundReport:
    total_bound: float
    per_block: list
    exact_distance: float | None

    @property
    def holds(self) -> bool:
        return self.exact_distance is None or self.exact_distance <= self.total_bound + 1e-9

    def __iter__(self):
        yield self.total_bound
        yield self.per_block

    def to_json(self, name: str = "") -> dict:
        return {"circuit": name, "total_bound": self.total_bound,
                "exact_distance": self.exact_distance, "per_block": self.per_block}


def _spans_of(original: PartitionedCircuit, optimized: Circuit):
    spans = getattr(optimized, "spans", None)
    if spans:
        if len(spans) != len(original.blocks) or spans[-1][1] != len(optimized.gates):
            raise ValueError("optimized circuit spans do not match the partition")
        return spans
    if optimized.structure() != original.source.structure():
        raise ValueError("optimized circuit carries no block spans and differs structurally from the source")
    return [b.span for b in original.blocks]


def verify_bound(original: PartitionedCircuit, optimized: Circuit, exact: bool = True) -> BoundReport:
    """Per-block distances, their sum, and (up to 8 qubits) the exact distance."""
    if optimized.n_qubits != original.source.n_qubits:
        raise DimensionError("optimized circuit width differs from the source")
    offsets = optimized.param_offsets()
    per_block = []
    for b, (s, e) in zip(original.blocks, _spans_of(original, optimized)):
        nb = _make_block(optimized, offsets, s, e, b.qubit_subset)
        if not set(q for g in nb.gates for q in g.qubits) <= set(b.qubit_subset):
            raise ValueError(f"optimized gates in span {s}:{e} leave block qubits {b.qubit_subset}")
        nb = Block(b.qubit_subset, nb.gates, nb.params, nb.span)
        per_block.append(hs_distance(b.local_unitary, nb.local_unitary))
    total = float(sum(per_block))
    exact_d = None
    if exact and optimized.n_qubits <= MAX_QUBITS:
        exact_d = hs_distance(evaluate(original.source), evaluate(optimized))
    return BoundReport(total, per_block, exact_d)
