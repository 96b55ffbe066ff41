"""Learned seed recommendation and unitary-dataset analysis."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..canonical import canonicalize, feature_vector
from ..templates import TemplateCatalog
from .dataset import (
    BenchmarkCircuit,
    LabeledUnitary,
    benchmark_suite,
    block_samples,
    generate_dataset,
    read_dataset,
    split_holdout,
    write_dataset,
)
from .mlp import Mlp, TrainConfig, finetune, pretrain_denoise, softmax


def new_model(catalog: TemplateCatalog, seed: int = 7, n_features: int | None = None) -> Mlp:
    n_tags = len(catalog.topologies)
    mask = np.zeros((n_tags, len(catalog)), dtype=bool)
    for t in catalog.templates:
        for tag in t.tags:
            mask[tag, t.id] = True
    n_features = n_features or 2 * (1 << catalog.n_qubits) ** 2
    return Mlp(n_features, n_tags, len(catalog), mask, seed=seed)


def _arrays(model: Mlp, data: Sequence[LabeledUnitary]):
    feats = np.array([d.features for d in data])
    tags = np.array([d.topology_tag for d in data])
    labels = np.array([d.template_id for d in data])
    return model.inputs(feats, tags), tags, labels


def train(model: Mlp, data: Sequence[LabeledUnitary], cfg: TrainConfig | None = None) -> dict:
    """Denoising pretraining followed by head finetuning; returns loss histories."""
    cfg = cfg or TrainConfig()
    if not data:
        raise ValueError("no training data")
    x, tags, labels = _arrays(model, data)
    pre = pretrain_denoise(model, x, cfg)
    fine = finetune(model, x, tags, labels, cfg)
    return {"pretrain": pre, "finetune": fine}


def recommend_seeds(model: Mlp, u, topology_tag: int, k: int = 3) -> list[int]:
    """Top-``k`` template ids for ``u`` among templates of ``topology_tag``."""
    if not model.trained:
        raise ValueError("model is untrained")
    feats = feature_vector(canonicalize(u))
    return rank_templates(model, feats[None, :], [topology_tag], k)[0]


def rank_templates(model: Mlp, features, tags, k: int) -> list[list[int]]:
    p = model.predict_proba(model.inputs(features, tags), tags)
    out = []
    for row, tag in zip(p, tags):
        allowed = np.flatnonzero(model.tag_mask[tag])
        # stable order: probability descending, then id ascending
        order = allowed[np.lexsort((allowed, -row[allowed]))]
        out.append([int(i) for i in order[:k]])
    return out


def topk_accuracy(model: Mlp, data: Sequence[LabeledUnitary], k: int) -> float:
    if not data:
        return float("nan")
    feats = np.array([d.features for d in data])
    tags = [d.topology_tag for d in data]
    ranks = rank_templates(model, feats, tags, k)
    return float(np.mean([d.template_id in r for d, r in zip(data, ranks)]))


@dataclass(frozen=True)
class PcaReport:
    ratios: np.ndarray  # per-component explained variance ratio, descending
    cumulative: np.ndarray
    degenerate: bool  # zero total variance

    def at(self, n_components: int) -> float:
        return float(self.cumulative[n_components - 1])


def pca_explained_variance(features) -> PcaReport:
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("PCA needs at least two samples")
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / (x.shape[0] - 1)
    evals = np.clip(np.linalg.eigvalsh(cov)[::-1], 0.0, None)
    total = evals.sum()
    if total <= 0:
        zeros = np.zeros_like(evals)
        return PcaReport(zeros, zeros.copy(), True)
    ratios = evals / total
    return PcaReport(ratios, np.cumsum(ratios), False)


__all__ = [
    "BenchmarkCircuit", "LabeledUnitary", "Mlp", "PcaReport", "TrainConfig",
    "benchmark_suite", "block_samples", "finetune", "generate_dataset", "new_model", "pca_explained_variance",
    "pretrain_denoise", "rank_templates", "read_dataset", "recommend_seeds", "softmax",
    "split_holdout", "topk_accuracy", "train", "write_dataset",
]
