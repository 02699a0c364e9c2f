"""Minibatch SGD with L2 regularization and training-time dropout.

The optimizer is plain SGD with a fixed learning rate. The regularizer
lambda * sum(W^2) covers the weight matrices of every parameterized layer
except the final one (biases are never regularized). Dropout masks and the
shuffle order are drawn from a single generator seeded by the config, so a
repeated run reproduces the weights bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import losses
from .network import (CLASSIFICATION, REGRESSION, Network, backward_layers,
                      run_layers, sample_batch_masks)


class TrainingDiverged(RuntimeError):
    """Loss became non-finite; carries the epoch where it happened."""

    def __init__(self, epoch: int):
        super().__init__(f"training loss became non-finite at epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    batch_size: int = 128
    learning_rate: float = 1e-3
    seed: int = 0
    loss: str | None = None  # default: mse for regression, cross-entropy for classification

    def __post_init__(self):
        if self.epochs <= 0 or self.batch_size <= 0 or self.learning_rate <= 0:
            raise ValueError("epochs, batch_size and learning_rate must be positive")


@dataclass
class TrainResult:
    network: Network
    history: list[float]  # mean total loss per epoch


def _resolve_loss(cfg: TrainConfig, head: str) -> str:
    if cfg.loss is not None:
        return cfg.loss
    return losses.MSE if head == REGRESSION else losses.CROSS_ENTROPY


def _prepare_targets(net: Network, labels: np.ndarray) -> np.ndarray:
    """Regression: (N,) reals -> (N, 1). Classification: class indices kept as ints."""
    labels = np.asarray(labels)
    if net.spec.head == REGRESSION:
        t = labels.astype(np.float64)
        if t.ndim == 1:
            t = t[:, None]
        if t.shape[1:] != net.spec.output_shape:
            raise ValueError(f"target shape {t.shape[1:]} != output {net.spec.output_shape}")
        return t
    idx = labels.astype(np.int64)
    if idx.ndim != 1:
        raise ValueError("classification labels must be a vector of class indices")
    if idx.min() < 0 or idx.max() >= net.spec.n_classes:
        raise ValueError("class index out of range")
    return idx


def _one_hot(idx: np.ndarray, n_classes: int) -> np.ndarray:
    out = np.zeros((idx.shape[0], n_classes))
    out[np.arange(idx.shape[0]), idx] = 1.0
    return out


def l2_penalty(net: Network) -> float:
    """lambda * sum of squared weights over all but the final parameterized layer."""
    lam = net.spec.l2_lambda
    if lam == 0.0:
        return 0.0
    idx = net.spec.param_layer_indices()
    return lam * sum(float(np.sum(net.weights[i]["w"] ** 2)) for i in idx[:-1])


def loss_and_grads(net: Network, xb: np.ndarray, targets: np.ndarray,
                   masks: list | None, loss_kind: str):
    """Total loss (data + L2) and layer-aligned gradient dicts for one batch."""
    out, caches = run_layers(net, xb, masks, want_caches=True)
    data_loss = losses.loss_value(loss_kind, out, targets)
    dout = losses.loss_grad(loss_kind, out, targets)
    grads, _ = backward_layers(net, caches, dout)
    lam = net.spec.l2_lambda
    total = data_loss + l2_penalty(net)
    if lam > 0.0:
        for i in net.spec.param_layer_indices()[:-1]:
            grads[i]["w"] = grads[i]["w"] + 2.0 * lam * net.weights[i]["w"]
    return total, grads


def train(net: Network, inputs: np.ndarray, labels: np.ndarray,
          cfg: TrainConfig) -> TrainResult:
    """Train a copy of `net`; returns the trained network and per-epoch loss."""
    inputs = np.asarray(inputs)
    n = inputs.shape[0]
    if n == 0:
        raise ValueError("empty dataset")
    if cfg.batch_size > n:
        raise ValueError(f"batch_size {cfg.batch_size} exceeds dataset size {n}")
    if tuple(inputs.shape[1:]) != tuple(net.spec.input_shape):
        raise ValueError(f"input shape {inputs.shape[1:]} != spec {net.spec.input_shape}")
    targets = _prepare_targets(net, labels)
    if targets.shape[0] != n:
        raise ValueError("inputs and labels disagree on sample count")

    loss_kind = _resolve_loss(cfg, net.spec.head)
    if net.spec.head == CLASSIFICATION and loss_kind == losses.MSE:
        raise ValueError("mse loss is not supported on a classification head")

    net = net.copy()
    rng = np.random.default_rng(cfg.seed & 0xFFFFFFFFFFFFFFFF)
    lr = cfg.learning_rate
    history: list[float] = []
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = perm[start:start + cfg.batch_size]
            xb = inputs[batch].astype(np.float64)
            if net.spec.head == CLASSIFICATION:
                tb = _one_hot(targets[batch], net.spec.n_classes)
            else:
                tb = targets[batch]
            masks = sample_batch_masks(net.spec, rng, len(batch))
            total, grads = loss_and_grads(net, xb, tb, masks, loss_kind)
            if not np.isfinite(total):
                raise TrainingDiverged(epoch)
            for i in net.spec.param_layer_indices():
                net.weights[i]["w"] -= lr * grads[i]["w"]
                net.weights[i]["b"] -= lr * grads[i]["b"]
            epoch_loss += total * len(batch)
        history.append(epoch_loss / n)
    return TrainResult(net, history)
