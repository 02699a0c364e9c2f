"""Training losses: mean squared error and categorical cross-entropy.

Both accept a single sample or a batch (leading axis) and reduce to a
batch-mean scalar. Cross-entropy clamps probabilities at CE_EPS = 1e-12
before taking the log, so a zero probability at the target index yields a
large finite loss instead of inf.
"""

from __future__ import annotations

import numpy as np

MSE = "mse"
CROSS_ENTROPY = "cross-entropy"

CE_EPS = 1e-12


def mse(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean of squared differences over every element."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    diff = pred - target
    return float(np.mean(diff * diff))


def mse_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    return 2.0 * (pred - target) / pred.size


def cross_entropy(pred: np.ndarray, target: np.ndarray) -> float:
    """-sum(target * ln pred) per sample (natural log), averaged over a batch.

    pred rows must be probability vectors and target rows one-hot.
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    p = np.clip(pred, CE_EPS, None)
    per_sample = -(target * np.log(p)).sum(axis=-1)
    return float(np.mean(per_sample))


def cross_entropy_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    p = np.clip(pred, CE_EPS, None)
    n = 1 if pred.ndim == 1 else pred.shape[0]
    grad = -(target / p) / n
    # clamped entries have zero local slope
    grad[pred < CE_EPS] = 0.0
    return grad


def loss_value(kind: str, pred: np.ndarray, target: np.ndarray) -> float:
    if kind == MSE:
        return mse(pred, target)
    if kind == CROSS_ENTROPY:
        return cross_entropy(pred, target)
    raise ValueError(f"unknown loss kind {kind!r}")


def loss_grad(kind: str, pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    if kind == MSE:
        return mse_grad(pred, target)
    if kind == CROSS_ENTROPY:
        return cross_entropy_grad(pred, target)
    raise ValueError(f"unknown loss kind {kind!r}")
