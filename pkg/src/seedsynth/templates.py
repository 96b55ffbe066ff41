"""Template catalog: the circuit tree explored by bottom-up synthesis.

A template is a CNOT edge sequence.  Its skeleton is one U3 per qubit
followed, for every edge, by a CNOT (control = lower index) and a U3 on
each of the two touched qubits.  Appending an edge gives a child; the
parent's gate list is always a prefix of the child's.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import groupby
from pathlib import Path
from typing import Iterable, Sequence

from .circuit import Circuit, QubitTopology, cx, u3

Edge = tuple[int, int]

# vertex labelings of the 3-qubit line: 0-1-2, 0-2-1, 1-0-2
LINE_LABELINGS = ((0, 1, 2), (0, 2, 1), (1, 0, 2))


def default_topologies(n_qubits: int = 3) -> list[QubitTopology]:
    if n_qubits == 3:
        return [QubitTopology.line(o) for o in LINE_LABELINGS]
    return [QubitTopology.line(tuple(range(n_qubits)))]


def skeleton(n_qubits: int, edges: Sequence[Edge]) -> Circuit:
    gates = [u3(q) for q in range(n_qubits)]
    for a, b in edges:
        gates += [cx(a, b), u3(a), u3(b)]
    return Circuit.skeleton(n_qubits, gates)


def max_run(edges: Sequence[Edge]) -> int:
    return max((len(list(g)) for _, g in groupby(edges)), default=0)


@dataclass(frozen=True)
class Template:
    id: int
    edges: tuple[Edge, ...]
    n_qubits: int
    tags: frozenset  # indices of the catalog topologies containing every edge
    parent: int | None

    @property
    def cnot_count(self) -> int:
        return len(self.edges)

    @cached_property
    def skeleton(self) -> Circuit:
        return skeleton(self.n_qubits, self.edges)


@dataclass
class TemplateCatalog:
    n_qubits: int
    K: int
    topologies: list[QubitTopology]
    templates: list[Template]
    consecutive_limit: int = 3
    _by_edges: dict = field(default_factory=dict, repr=False)
    _children: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_edges = {t.edges: t.id for t in self.templates}
        kids: dict[int, list[int]] = {t.id: [] for t in self.templates}
        for t in self.templates:
            if t.parent is not None:
                kids[t.parent].append(t.id)
        self._children = kids

    def __len__(self) -> int:
        return len(self.templates)

    def __getitem__(self, tid: int) -> Template:
        if not 0 <= tid < len(self.templates):
            raise KeyError(f"unknown template id {tid}")
        return self.templates[tid]

    @property
    def root(self) -> Template:
        return self.templates[0]

    def lookup(self, edges: Iterable[Edge]) -> int | None:
        return self._by_edges.get(tuple(tuple(e) for e in edges))

    def ids_for_tag(self, tag: int) -> list[int]:
        return [t.id for t in self.templates if tag in t.tags]

    def to_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for t in self.templates:
                rec = {
                    "id": t.id,
                    "topology": sorted(t.tags),
                    "edges": [list(e) for e in t.edges],
                    "cnot_count": t.cnot_count,
                }
                fh.write(json.dumps(rec) + "\n")


def _sequences(edges: list[Edge], depth: int, limit: int):
    # lexicographic edge sequences of given length with runs <= limit
    if depth == 0:
        yield ()
        return
    for prefix in _sequences(edges, depth - 1, limit):
        for e in edges:
            cand = prefix + (e,)
            if len(cand) > limit and all(x == e for x in cand[-limit - 1:]):
                continue
            yield cand


def enumerate_templates(
    n_qubits: int = 3,
    K: int = 8,
    topologies: Sequence[QubitTopology] | None = None,
    consecutive_limit: int = 3,
) -> TemplateCatalog:
    """Breadth-first catalog of every template with at most ``K`` CNOTs.

    Within a depth level templates are ordered by the first topology that
    admits them (declared order), then lexicographically by edge sequence.
    Sequences admitted by several topologies appear once.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    topos = list(topologies) if topologies is not None else default_topologies(n_qubits)
    if not topos:
        raise ValueError("at least one topology is required")
    for t in topos:
        if t.n_qubits != n_qubits:
            raise ValueError("topology width does not match n_qubits")
    topo_edges = [t.sorted_edges() for t in topos]

    def tags_of(seq) -> frozenset:
        used = set(seq)
        return frozenset(i for i, es in enumerate(topo_edges) if used <= set(es))

    templates: list[Template] = []
    index: dict[tuple, int] = {}
    for depth in range(K + 1):
        for edges in topo_edges:
            for seq in _sequences(edges, depth, consecutive_limit):
                if seq in index:
                    continue
                parent = index[seq[:-1]] if seq else None
                tid = len(templates)
                index[seq] = tid
                templates.append(Template(tid, seq, n_qubits, tags_of(seq), parent))
    return TemplateCatalog(n_qubits, K, topos, templates, consecutive_limit)


def children(cat: TemplateCatalog, tid: int, tag: int | None = None) -> list[int]:
    cat[tid]
    kids = cat._children[tid]
    if tag is None:
        return list(kids)
    return [k for k in kids if tag in cat.templates[k].tags]


def parent(cat: TemplateCatalog, tid: int) -> int | None:
    return cat[tid].parent


def template_histogram(assignments: Iterable[tuple[object, int]]) -> dict[int, int]:
    """Counts per template id, most frequent first (ties by id)."""
    counts = Counter(tid for _, tid in assignments)
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


def read_catalog_jsonl(path) -> list[dict]:
    return [json.loads(ln) for ln in Path(path).read_text().splitlines() if ln.strip()]


def infer_tag(c: Circuit, cat: TemplateCatalog) -> int:
    """Index of the first catalog topology containing every CNOT edge of ``c``.

    Falls back to the topology sharing the most edges when none contains
    them all.
    """
    used = {(min(g.qubits), max(g.qubits)) for g in c.gates if g.kind == "cx"}
    for i, t in enumerate(cat.topologies):
        if used <= t.edges:
            return i
    return max(range(len(cat.topologies)), key=lambda i: (len(used & cat.topologies[i].edges), -i))
