"""Best-first synthesis over the template tree, from the root or from seeds."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit
from .errors import DimensionError, NoSolutionError
from .instantiate import InstantiationConfig, InstantiationResult, count_calls, instantiate
from .linalg import max_cnots as _max_cnots
from .templates import TemplateCatalog, children, parent

ROOT = "root"
SEEDED = "seeded"
RANDOM_SEEDED = "random_seeded"


@dataclass(frozen=True)
class SearchConfig:
    inst: InstantiationConfig = field(default_factory=InstantiationConfig)
    depth_weight: float = 0.01
    max_cnots: int | None = None
    frontier_limit: int | None = None
    max_nodes: int | None = None

    def __post_init__(self):
        if self.depth_weight < 0:
            raise ValueError("depth_weight must be >= 0")
        for name in ("max_cnots", "frontier_limit", "max_nodes"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class SynthesisResult:
    circuit: Circuit
    template_id: int
    cost: float
    instantiation_calls: int
    nodes_visited: int
    strategy: str

    @property
    def cnot_count(self) -> int:
        return self.circuit.cnot_count


def _search(target, catalog: TemplateCatalog, cfg: SearchConfig, starts: Sequence[int],
            strategy: str, tag: int | None, upward: bool) -> SynthesisResult:
    target = np.asarray(target, dtype=np.complex128)
    if target.shape != (1 << catalog.n_qubits,) * 2:
        raise DimensionError(f"target shape {target.shape} does not match {catalog.n_qubits}-qubit catalog")
    if not starts:
        raise ValueError("at least one start node is required")
    cap = cfg.max_cnots if cfg.max_cnots is not None else _max_cnots(catalog.n_qubits)
    results: dict[int, InstantiationResult] = {}
    frontier: list[tuple[float, int, int]] = []

    with count_calls() as calls:

        def visit(tid: int) -> None:
            t = catalog[tid]
            r = instantiate(target, t, cfg.inst)
            results[tid] = r
            heapq.heappush(frontier, (r.cost + cfg.depth_weight * t.cnot_count, t.cnot_count, tid))

        def done(tid: int) -> SynthesisResult:
            r = results[tid]
            return SynthesisResult(r.circuit, tid, r.cost, calls.count, len(results), strategy)

        for s in dict.fromkeys(starts):
            catalog[s]
            if catalog[s].cnot_count <= cap:
                visit(s)
        while frontier:
            _, _, tid = heapq.heappop(frontier)
            if results[tid].converged:
                return done(tid)
            nbrs = children(catalog, tid, tag)
            up = parent(catalog, tid) if upward else None
            if up is not None:
                nbrs = [up] + nbrs
            for nb in nbrs:
                if cfg.max_nodes is not None and len(results) >= cfg.max_nodes:
                    break
                if nb not in results and catalog[nb].cnot_count <= cap:
                    visit(nb)
            if cfg.frontier_limit is not None and len(frontier) > cfg.frontier_limit:
                frontier = heapq.nsmallest(cfg.frontier_limit, frontier)
                heapq.heapify(frontier)

    if not results:
        raise NoSolutionError("no start node within the CNOT cap")
    best_id = min(results, key=lambda k: (results[k].cost, catalog[k].cnot_count, k))
    raise NoSolutionError(
        f"search exhausted after {len(results)} nodes; best cost {results[best_id].cost:.3e}",
        best=SynthesisResult(results[best_id].circuit, best_id, results[best_id].cost,
                             calls.count, len(results), strategy),
    )


def synthesize(target, catalog: TemplateCatalog, cfg: SearchConfig | None = None,
               tag: int | None = None) -> SynthesisResult:
    """Bottom-up synthesis starting at the root template.

    ``tag`` restricts the search to templates of one catalog topology.
    """
    return _search(target, catalog, cfg or SearchConfig(), [catalog.root.id], ROOT, tag, upward=False)


def seeded_synthesize(target, catalog: TemplateCatalog, seeds: Sequence[int],
                      cfg: SearchConfig | None = None, tag: int | None = None,
                      strategy: str = SEEDED) -> SynthesisResult:
    """Synthesis starting from every seed at once, moving both down and up the tree."""
    if not seeds:
        raise ValueError("seeds must be nonempty")
    return _search(target, catalog, cfg or SearchConfig(), list(seeds), strategy, tag, upward=True)


def random_seeds(catalog: TemplateCatalog, count: int, rng_seed: int, tag: int | None = None) -> list[int]:
    pool = catalog.ids_for_tag(tag) if tag is not None else [t.id for t in catalog.templates]
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > len(pool):
        raise ValueError(f"count {count} exceeds catalog size {len(pool)}")
    rng = np.random.default_rng(rng_seed)
    return [int(i) for i in rng.choice(pool, size=count, replace=False)]
