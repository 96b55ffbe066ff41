"""Partition -> per-block synthesis -> reassembly -> verification."""
from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NoSolutionError
from .linalg import phase_invariant_distance
from .partition import BoundReport, PartitionedCircuit, pad_blocks, partition, reassemble, verify_bound
from .synth import RANDOM_SEEDED, SearchConfig, SynthesisResult, random_seeds, seeded_synthesize, synthesize
from .templates import TemplateCatalog, infer_tag

log = logging.getLogger(__name__)

STRATEGIES = ("root", "random", "learned")
METRICS_HEADER = ["block", "strategy", "instantiation_calls", "cnot_before", "cnot_after", "cost", "wall_time_s"]


@dataclass
class BlockRecord:
    block: int
    strategy: str
    instantiation_calls: int
    cnot_before: int
    cnot_after: int
    cost: float
    wall_time_s: float
    template_id: int | None = None
    ok: bool = True


@dataclass
class RunMetrics:
    records: list[BlockRecord] = field(default_factory=list)

    @property
    def mean_calls(self) -> float:
        return float(np.mean([r.instantiation_calls for r in self.records])) if self.records else 0.0

    @property
    def relative_cnot_ratio(self) -> float:
        before = sum(r.cnot_before for r in self.records)
        after = sum(r.cnot_after for r in self.records)
        return after / before if before > 0 else float("nan")

    def speedup_vs(self, root: "RunMetrics") -> float:
        return root.mean_calls / self.mean_calls if self.mean_calls else float("nan")

    def summary(self) -> dict:
        return {
            "blocks": len(self.records),
            "failed_blocks": sum(not r.ok for r in self.records),
            "mean_calls": self.mean_calls,
            "total_calls": sum(r.instantiation_calls for r in self.records),
            "cnot_before": sum(r.cnot_before for r in self.records),
            "cnot_after": sum(r.cnot_after for r in self.records),
            "relative_cnot_ratio": self.relative_cnot_ratio,
            "wall_time_s": sum(r.wall_time_s for r in self.records),
        }

    def write_csv(self, path, record_time: bool = False) -> None:
        """Append rows (header only when the file is new)."""
        new = not os.path.exists(path) or os.path.getsize(path) == 0
        with open(path, "a", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if new:
                w.writerow(METRICS_HEADER)
            for r in self.records:
                w.writerow([r.block, r.strategy, r.instantiation_calls, r.cnot_before, r.cnot_after,
                            repr(float(r.cost)), f"{r.wall_time_s:.6f}" if record_time else ""])


@dataclass
class OptimizeResult:
    circuit: object
    partitioned: PartitionedCircuit
    metrics: RunMetrics
    report: BoundReport

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.metrics.records) and self.report.holds


# worker-process state, set once per process
_STATE: dict = {}


def _init_worker(catalog, cfg, model, strategy, seeds_per_block, seed):
    _STATE.update(catalog=catalog, cfg=cfg, model=model, strategy=strategy,
                  k=seeds_per_block, seed=seed)


def block_seed(seed: int, index: int) -> int:
    return (seed * 1_000_003 + index) % (2**63)


def _synth_block(job):
    index, target, local = job
    catalog: TemplateCatalog = _STATE["catalog"]
    cfg: SearchConfig = _STATE["cfg"]
    strategy = _STATE["strategy"]
    tag = infer_tag(local, catalog)
    t0 = time.perf_counter()
    idle = phase_invariant_distance(target, np.eye(len(target)))
    try:
        if idle <= cfg.inst.stop_tol:
            # the block is already the identity: no search needed
            skel = catalog.root.skeleton
            r = SynthesisResult(skel.with_params(np.zeros(skel.num_params)), catalog.root.id, idle, 0, 0, strategy)
        elif strategy == "root":
            r = synthesize(target, catalog, cfg, tag=tag)
        elif strategy == "random":
            seeds = random_seeds(catalog, _STATE["k"], block_seed(_STATE["seed"], index), tag=tag)
            r = seeded_synthesize(target, catalog, seeds, cfg, tag=tag, strategy=RANDOM_SEEDED)
        else:
            from .recommend import recommend_seeds

            seeds = recommend_seeds(_STATE["model"], target, tag, _STATE["k"])
            r = seeded_synthesize(target, catalog, seeds, cfg, tag=tag)
        ok, best = True, r
    except NoSolutionError as exc:
        ok, best = False, exc.best
    dt = time.perf_counter() - t0
    return index, ok, best, dt


def optimize(circuit, catalog: TemplateCatalog, strategy: str = "root", cfg: SearchConfig | None = None,
             model=None, seeds_per_block: int = 3, seed: int = 0, jobs: int = 1, w: int = 3) -> OptimizeResult:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "learned" and model is None:
        raise ValueError("the learned strategy needs a model")
    if catalog.n_qubits != w:
        raise ValueError("catalog width must equal the partition width")
    cfg = cfg or SearchConfig()
    part = pad_blocks(partition(circuit, w), w)
    jobs_list = [(i, b.local_unitary, b.local_circuit) for i, b in enumerate(part.blocks)]
    init = (catalog, cfg, model, strategy, seeds_per_block, seed)
    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=init) as ex:
            outcomes = list(ex.map(_synth_block, jobs_list))
    else:
        _init_worker(*init)
        outcomes = [_synth_block(j) for j in jobs_list]

    metrics = RunMetrics()
    replacements = {}
    for (index, ok, res, dt), blk in zip(sorted(outcomes, key=lambda o: o[0]), part.blocks):
        if ok:
            replacements[index] = res.circuit
        else:
            log.warning("block %d: synthesis failed; keeping original gates", index)
        metrics.records.append(BlockRecord(
            block=index,
            strategy=strategy,
            instantiation_calls=res.instantiation_calls if res is not None else 0,
            cnot_before=blk.cnot_count,
            cnot_after=res.cnot_count if ok else blk.cnot_count,
            cost=res.cost if res is not None else math.nan,
            wall_time_s=dt,
            template_id=res.template_id if ok else None,
            ok=ok,
        ))
    assembled = reassemble(part, replacements)
    report = verify_bound(part, assembled)
    return OptimizeResult(assembled, part, metrics, report)


def compare_strategies(circuits: Sequence, catalog, strategies=STRATEGIES, **kw) -> dict[str, RunMetrics]:
    out = {}
    for s in strategies:
        m = RunMetrics()
        for c in circuits:
            m.records += optimize(c, catalog, s, **kw).metrics.records
        out[s] = m
    return out


EVAL_HEADER = ["block", "family", "width", "topology", "template_id", "top3_hit",
               "root_calls", "learned_calls", "random_calls",
               "cnot_before", "root_cnots", "learned_cnots", "random_cnots"]


@dataclass
class HoldoutReport:
    rows: list[dict]
    top1: float
    top3: float
    top1_by_topology: dict[int, float]
    top3_by_topology: dict[int, float]
    chance_top3: float  # expected top-3 hit rate of uniformly random seeds
    metrics: dict[str, RunMetrics]

    def summary(self) -> dict:
        root = self.metrics["root"]
        out = {
            "blocks": len(self.rows),
            "top1": self.top1,
            "top3": self.top3,
            "top1_by_topology": self.top1_by_topology,
            "top3_by_topology": self.top3_by_topology,
            "chance_top3": self.chance_top3,
        }
        for name, m in self.metrics.items():
            out[name] = {"mean_calls": m.mean_calls, "relative_cnot_ratio": m.relative_cnot_ratio,
                         "speedup_vs_root": m.speedup_vs(root)}
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, EVAL_HEADER, lineterminator="\n")
            w.writeheader()
            w.writerows(self.rows)


def evaluate_holdout(model, data, catalog: TemplateCatalog, cfg: SearchConfig | None = None,
                     seeds_per_block: int = 3, seed: int = 0) -> HoldoutReport:
    """Compare root, learned-seed and random-seed synthesis on labelled blocks.

    Root-start figures come from the labelling run stored in ``data``.
    """
    from .recommend import rank_templates

    if not data:
        raise ValueError("empty evaluation set")
    cfg = cfg or SearchConfig()
    feats = np.array([d.features for d in data])
    tags = [d.topology_tag for d in data]
    ranked = rank_templates(model, feats, tags, seeds_per_block)
    metrics = {s: RunMetrics() for s in STRATEGIES}
    rows = []
    for i, (d, seeds) in enumerate(zip(data, ranked)):
        u = d.unitary()
        learned = seeded_synthesize(u, catalog, seeds, cfg, tag=d.topology_tag)
        rand = seeded_synthesize(u, catalog, random_seeds(catalog, seeds_per_block, block_seed(seed, i),
                                                          tag=d.topology_tag),
                                 cfg, tag=d.topology_tag, strategy=RANDOM_SEEDED)
        for name, calls, cn, cost in (("root", d.root_calls, d.root_cnots, math.nan),
                                      ("learned", learned.instantiation_calls, learned.cnot_count, learned.cost),
                                      ("random", rand.instantiation_calls, rand.cnot_count, rand.cost)):
            metrics[name].records.append(BlockRecord(i, name, calls, d.source_cnots, cn, cost, 0.0))
        rows.append({
            "block": i, "family": d.circuit_family, "width": d.circuit_width, "topology": d.topology_tag,
            "template_id": d.template_id, "top3_hit": int(d.template_id in seeds[:3]),
            "root_calls": d.root_calls, "learned_calls": learned.instantiation_calls,
            "random_calls": rand.instantiation_calls, "cnot_before": d.source_cnots,
            "root_cnots": d.root_cnots, "learned_cnots": learned.cnot_count, "random_cnots": rand.cnot_count,
        })
    top1 = [d.template_id == r[0] for d, r in zip(data, ranked)]
    top3 = [d.template_id in r[:3] for d, r in zip(data, ranked)]
    by1: dict[int, list] = {}
    by3: dict[int, list] = {}
    for t, a, b in zip(tags, top1, top3):
        by1.setdefault(t, []).append(a)
        by3.setdefault(t, []).append(b)
    chance = float(np.mean([min(3, len(catalog.ids_for_tag(t))) / len(catalog.ids_for_tag(t)) for t in tags]))
    return HoldoutReport(
        rows, float(np.mean(top1)), float(np.mean(top3)),
        {t: float(np.mean(v)) for t, v in sorted(by1.items())},
        {t: float(np.mean(v)) for t, v in sorted(by3.items())},
        chance, metrics,
    )
