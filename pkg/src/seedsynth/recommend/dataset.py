"""Labelled unitary datasets built by partitioning and root-start synthesis."""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..canonical import canonicalize, feature_vector
from ..circuit import Circuit
from ..errors import NoSolutionError
from ..partition import pad_blocks, partition
from ..synth import SearchConfig, synthesize
from ..templates import TemplateCatalog, infer_tag

log = logging.getLogger(__name__)


@dataclass
class LabeledUnitary:
    features: np.ndarray
    template_id: int
    topology_tag: int
    circuit_family: str = ""
    circuit_width: int = 0
    # bookkeeping from the labelling run; used by evaluation
    source_cnots: int = 0
    root_calls: int = 0
    root_cnots: int = 0

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)

    def unitary(self) -> np.ndarray:
        """The canonical block unitary the features were taken from."""
        f = self.features
        dim = int(round(np.sqrt(f.size / 2)))
        return (f[0::2] + 1j * f[1::2]).reshape(dim, dim)


@dataclass
class BenchmarkCircuit:
    circuit: Circuit
    family: str = ""
    width: int = 0
    meta: dict = field(default_factory=dict)


def block_samples(circuit: Circuit, w: int = 3):
    """(canonical features, local circuit, local unitary) for every padded block."""
    p = pad_blocks(partition(circuit, w), w)
    for b in p.blocks:
        c = canonicalize(b.local_unitary)
        yield feature_vector(c), b.local_circuit, b.local_unitary


def generate_dataset(circuits: Sequence, catalog: TemplateCatalog, synth_cfg: SearchConfig | None = None,
                     families: Sequence[str] | None = None, widths: Sequence[int] | None = None
                     ) -> tuple[list[LabeledUnitary], int]:
    """Label every 3-qubit block of ``circuits`` with its root-start solution.

    ``circuits`` holds Circuit or BenchmarkCircuit items.  Blocks whose
    synthesis fails are logged and skipped.  Returns ``(dataset, failures)``.
    """
    synth_cfg = synth_cfg or SearchConfig()
    cache: dict[tuple, tuple] = {}
    out: list[LabeledUnitary] = []
    failures = 0
    for i, item in enumerate(circuits):
        if isinstance(item, BenchmarkCircuit):
            circ, fam, width = item.circuit, item.family, item.width
        else:
            circ = item
            fam = families[i] if families else ""
            width = widths[i] if widths else item.n_qubits
        for feats, local, unitary in block_samples(circ, catalog.n_qubits):
            tag = infer_tag(local, catalog)
            key = (tag, np.round(feats, 9).tobytes())
            if key not in cache:
                try:
                    r = synthesize(unitary, catalog, synth_cfg, tag=tag)
                    cache[key] = (r.template_id, r.instantiation_calls, r.cnot_count)
                except NoSolutionError as exc:
                    log.warning("block of %s/%d skipped: %s", fam, width, exc)
                    cache[key] = None
            hit = cache[key]
            if hit is None:
                failures += 1
                continue
            tid, calls, cnots = hit
            out.append(LabeledUnitary(feats, tid, tag, fam, width, local.cnot_count, calls, cnots))
    return out, failures


def write_dataset(path, data: Iterable[LabeledUnitary], n_tags: int) -> None:
    with open(path, "w") as fh:
        for d in data:
            onehot = [0.0] * n_tags
            onehot[d.topology_tag] = 1.0
            rec = asdict(d)
            rec["features"] = [float(x) for x in d.features] + onehot
            rec["family"] = rec.pop("circuit_family")
            rec["width"] = rec.pop("circuit_width")
            fh.write(json.dumps(rec) + "\n")


def read_dataset(path, n_tags: int | None = None) -> list[LabeledUnitary]:
    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        feats = rec.pop("features")
        tags = n_tags if n_tags is not None else len(feats) - 128
        rec["features"] = feats[: len(feats) - tags]
        rec["circuit_family"] = rec.pop("family")
        rec["circuit_width"] = rec.pop("width")
        out.append(LabeledUnitary(**rec))
    return out


def split_holdout(data: Sequence[LabeledUnitary], holdout: dict[str, Iterable[int]]):
    """Split by (family, width); ``holdout`` maps family -> held-out widths."""
    held = {f: set(ws) for f, ws in holdout.items()}
    train, test = [], []
    for d in data:
        (test if d.circuit_width in held.get(d.circuit_family, ()) else train).append(d)
    return train, test


def benchmark_suite(families: Sequence[str] = ("qft", "tfim", "random_layers"),
                    widths: Sequence[int] = (3, 4, 5, 6), instances: int = 1,
                    depth: int = 3, seed: int = 0) -> list[BenchmarkCircuit]:
    """Seeded benchmark circuits; QFT is deterministic so it gets one instance."""
    from ..benchmarks import generate

    out = []
    for fam in families:
        for w in widths:
            for i in range(1 if fam == "qft" else instances):
                s = seed * 7919 + w * 101 + i
                out.append(BenchmarkCircuit(generate(fam, w, depth, s), fam, w, {"seed": s, "depth": depth}))
    return out
