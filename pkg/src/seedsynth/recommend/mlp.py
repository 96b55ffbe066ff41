"""Small fully connected network trained with plain minibatch SGD.

Layout (tanh on every hidden layer)::

    encoder  in -> 64 -> 32
    decoder  32 -> 64 -> in        (denoising pretraining only)
    head     32 -> 64 -> classes   (template scores)

Head logits for templates outside the requested topology are masked to
``-inf`` before the softmax, both in training and at inference.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import NumericalError

FORMAT_VERSION = 1
ENCODER = ("enc1", "enc2")
DECODER = ("dec1", "dec2")
HEAD = ("head1", "head2")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 64
    learning_rate: float = 0.05
    noise_std: float = 0.05
    rng_seed: int = 7
    holdout_fraction: float = 0.2

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if not self.learning_rate > 0 or self.noise_std < 0:
            raise ValueError("learning_rate must be positive and noise_std non-negative")
        if not 0 < self.holdout_fraction < 1:
            raise ValueError("holdout_fraction must lie in (0, 1)")


def _init(rng, fan_in, fan_out):
    w = rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, fan_out))
    return w, np.zeros(fan_out)


class Mlp:
    def __init__(self, n_features: int, n_tags: int, n_classes: int, tag_mask: np.ndarray,
                 hidden: int = 64, bottleneck: int = 32, seed: int = 0):
        self.n_features = n_features
        self.n_tags = n_tags
        self.n_classes = n_classes
        self.hidden = hidden
        self.bottleneck = bottleneck
        self.tag_mask = np.asarray(tag_mask, dtype=bool)
        if self.tag_mask.shape != (n_tags, n_classes):
            raise ValueError("tag_mask must have shape (n_tags, n_classes)")
        self.trained = False
        rng = np.random.default_rng(seed)
        d_in = n_features + n_tags
        shapes = {
            "enc1": (d_in, hidden), "enc2": (hidden, bottleneck),
            "dec1": (bottleneck, hidden), "dec2": (hidden, d_in),
            "head1": (bottleneck, hidden), "head2": (hidden, n_classes),
        }
        self.params: dict[str, np.ndarray] = {}
        for name, (a, b) in shapes.items():
            w, bias = _init(rng, a, b)
            self.params[name + ".w"] = w
            self.params[name + ".b"] = bias

    @property
    def layer_sizes(self) -> list[int]:
        return [self.n_features + self.n_tags, self.hidden, self.bottleneck, self.hidden, self.n_classes]

    def inputs(self, features, tags) -> np.ndarray:
        x = np.atleast_2d(np.asarray(features, dtype=np.float64))
        onehot = np.zeros((x.shape[0], self.n_tags))
        onehot[np.arange(x.shape[0]), np.asarray(tags, dtype=int).ravel()] = 1.0
        return np.hstack([x, onehot])

    def _run(self, x, names, last_linear=True):
        acts = [x]
        for i, name in enumerate(names):
            z = acts[-1] @ self.params[name + ".w"] + self.params[name + ".b"]
            last = i == len(names) - 1
            acts.append(z if (last and last_linear) else np.tanh(z))
        return acts

    def _back(self, acts, names, delta, grads, last_linear=True):
        for i in range(len(names) - 1, -1, -1):
            name = names[i]
            if not (i == len(names) - 1 and last_linear):
                delta = delta * (1.0 - acts[i + 1] ** 2)
            grads[name + ".w"] = grads.get(name + ".w", 0) + acts[i].T @ delta
            grads[name + ".b"] = grads.get(name + ".b", 0) + delta.sum(axis=0)
            delta = delta @ self.params[name + ".w"].T
        return delta

    def encode(self, x) -> np.ndarray:
        return self._run(x, ENCODER, last_linear=False)[-1]

    def logits(self, x, tags) -> np.ndarray:
        z = self._run(self.encode(x), HEAD)[-1]
        return np.where(self.tag_mask[np.asarray(tags, dtype=int)], z, -np.inf)

    def predict_proba(self, x, tags) -> np.ndarray:
        return softmax(self.logits(x, tags))

    def reconstruction_loss(self, noisy, clean, with_grad=False):
        enc = self._run(noisy, ENCODER, last_linear=False)
        dec = self._run(enc[-1], DECODER)
        diff = dec[-1] - clean
        loss = float(np.mean(diff**2))
        if not with_grad:
            return loss
        grads: dict = {}
        delta = 2.0 * diff / diff.size
        delta = self._back(dec, DECODER, delta, grads)
        self._back(enc, ENCODER, delta, grads, last_linear=False)
        return loss, grads

    def classification_loss(self, x, tags, labels, with_grad=False):
        enc = self._run(x, ENCODER, last_linear=False)
        head = self._run(enc[-1], HEAD)
        z = np.where(self.tag_mask[np.asarray(tags, dtype=int)], head[-1], -np.inf)
        p = softmax(z)
        rows = np.arange(len(labels))
        picked = p[rows, labels]
        if np.any(picked <= 0):
            raise ValueError("a label lies outside its topology mask")
        loss = float(-np.mean(np.log(picked)))
        if not with_grad:
            return loss
        grads: dict = {}
        delta = p.copy()
        delta[rows, labels] -= 1.0
        delta /= len(labels)
        delta = self._back(head, HEAD, delta, grads)
        self._back(enc, ENCODER, delta, grads, last_linear=False)
        return loss, grads

    def sgd_step(self, grads, lr):
        for k, g in grads.items():
            self.params[k] -= lr * g

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "layer_sizes": self.layer_sizes,
            "n_features": self.n_features,
            "n_tags": self.n_tags,
            "n_classes": self.n_classes,
            "hidden": self.hidden,
            "bottleneck": self.bottleneck,
            "trained": self.trained,
            "tag_mask": self.tag_mask.astype(int).tolist(),
            "weights": {k: {"shape": list(v.shape), "data": v.ravel().tolist()} for k, v in self.params.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Mlp":
        if d.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported model version {d.get('version')}")
        m = cls(d["n_features"], d["n_tags"], d["n_classes"], np.array(d["tag_mask"], dtype=bool),
                d["hidden"], d["bottleneck"])
        for k, v in d["weights"].items():
            m.params[k] = np.array(v["data"], dtype=np.float64).reshape(v["shape"])
        m.trained = d["trained"]
        return m

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "Mlp":
        return cls.from_dict(json.loads(Path(path).read_text()))


def softmax(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    m = np.max(z, axis=-1, keepdims=True)
    e = np.exp(z - m)
    return e / e.sum(axis=-1, keepdims=True)


def _batches(n, size, rng):
    order = rng.permutation(n)
    for i in range(0, n, size):
        yield order[i:i + size]


def pretrain_denoise(model: Mlp, x: np.ndarray, cfg: TrainConfig) -> list[float]:
    """Train encoder + decoder to reconstruct ``x`` from ``x + noise``.

    Returns the mean training loss per epoch.
    """
    x = np.asarray(x, dtype=np.float64)
    if len(x) == 0:
        raise ValueError("no training data")
    rng = np.random.default_rng(cfg.rng_seed)
    history = []
    for _ in range(cfg.epochs):
        total = 0.0
        for idx in _batches(len(x), cfg.batch_size, rng):
            clean = x[idx]
            noisy = clean + rng.normal(0.0, cfg.noise_std, size=clean.shape)
            loss, grads = model.reconstruction_loss(noisy, clean, with_grad=True)
            if not np.isfinite(loss):
                raise NumericalError("non-finite reconstruction loss")
            model.sgd_step(grads, cfg.learning_rate)
            total += loss * len(idx)
        history.append(total / len(x))
    return history


def finetune(model: Mlp, x: np.ndarray, tags, labels, cfg: TrainConfig) -> list[float]:
    """Train encoder + head on template labels (masked cross-entropy)."""
    x = np.asarray(x, dtype=np.float64)
    tags = np.asarray(tags, dtype=int)
    labels = np.asarray(labels, dtype=int)
    if len(x) == 0:
        raise ValueError("no training data")
    rng = np.random.default_rng(cfg.rng_seed + 1)
    history = []
    for _ in range(cfg.epochs):
        total = 0.0
        for idx in _batches(len(x), cfg.batch_size, rng):
            loss, grads = model.classification_loss(x[idx], tags[idx], labels[idx], with_grad=True)
            if not np.isfinite(loss):
                raise NumericalError("non-finite classification loss")
            model.sgd_step(grads, cfg.learning_rate)
            total += loss * len(idx)
        history.append(total / len(x))
    model.trained = True
    return history
