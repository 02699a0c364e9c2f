"""Forward/backward kernels for the few layer kinds the controllers need.

All kernels operate on batched, channel-last float64 arrays: images are
(N, H, W, C), flat activations are (N, D). Convolutions use valid padding
(no implicit zero border); output spatial dims are floor((in - k)/stride) + 1.
Each forward returns (output, cache) and the matching backward consumes the
cache, so a network can chain them without retaining layer objects.
"""

from __future__ import annotations

import numpy as np


def conv_out_hw(h: int, w: int, kernel: int, stride: int) -> tuple[int, int]:
    """Spatial output size of a valid convolution."""
    oh = (h - kernel) // stride + 1
    ow = (w - kernel) // stride + 1
    return oh, ow


def _im2col(x: np.ndarray, kernel: int, stride: int) -> np.ndarray:
    """Gather kernel patches into a (N, OH, OW, kernel*kernel*C) matrix.

    Built from kernel*kernel strided slice copies, which keeps the heavy
    lifting inside BLAS-backed matmuls downstream.
    """
    n, h, w, c = x.shape
    oh, ow = conv_out_hw(h, w, kernel, stride)
    cols = np.empty((n, oh, ow, kernel, kernel, c), dtype=x.dtype)
    for i in range(kernel):
        for j in range(kernel):
            cols[:, :, :, i, j, :] = x[:, i:i + stride * oh:stride, j:j + stride * ow:stride, :]
    return cols.reshape(n, oh, ow, kernel * kernel * c)


def _col2im(dcols: np.ndarray, x_shape: tuple, kernel: int, stride: int) -> np.ndarray:
    """Scatter-add patch gradients back onto the input layout (im2col adjoint)."""
    n, h, w, c = x_shape
    oh, ow = conv_out_hw(h, w, kernel, stride)
    dx = np.zeros(x_shape, dtype=dcols.dtype)
    d6 = dcols.reshape(n, oh, ow, kernel, kernel, c)
    for i in range(kernel):
        for j in range(kernel):
            dx[:, i:i + stride * oh:stride, j:j + stride * ow:stride, :] += d6[:, :, :, i, j, :]
    return dx


def conv_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int):
    """Valid convolution. x: (N,H,W,C), w: (k,k,C,F), b: (F,)."""
    kernel = w.shape[0]
    filters = w.shape[3]
    cols = _im2col(x, kernel, stride)
    out = cols @ w.reshape(-1, filters) + b
    cache = (cols, x.shape, w, stride)
    return out, cache


def conv_backward(dout: np.ndarray, cache):
    cols, x_shape, w, stride = cache
    kernel = w.shape[0]
    filters = w.shape[3]
    dmat = dout.reshape(-1, filters)
    dw = (cols.reshape(-1, cols.shape[-1]).T @ dmat).reshape(w.shape)
    db = dmat.sum(axis=0)
    dcols = dmat @ w.reshape(-1, filters).T
    dx = _col2im(dcols.reshape(cols.shape), x_shape, kernel, stride)
    return dx, dw, db


def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """x: (N, D), w: (D, U), b: (U,)."""
    out = x @ w + b
    return out, (x, w)


def dense_backward(dout: np.ndarray, cache):
    x, w = cache
    dw = x.T @ dout
    db = dout.sum(axis=0)
    dx = dout @ w.T
    return dx, dw, db


def relu_forward(x: np.ndarray):
    keep = x > 0
    return x * keep, keep


def relu_backward(dout: np.ndarray, keep: np.ndarray):
    return dout * keep


def softmax_forward(z: np.ndarray):
    """Row-wise stable softmax on (N, C); max subtraction avoids overflow."""
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=-1, keepdims=True)
    return p, p


def softmax_probs(logits: np.ndarray) -> np.ndarray:
    """Validated softmax over the last axis: exp(z_i) / sum_k exp(z_k).

    Raises on empty or non-finite input; stable for large magnitudes.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.size == 0:
        raise ValueError("softmax of empty input")
    if not np.isfinite(z).all():
        raise ValueError("softmax input contains non-finite values")
    p, _ = softmax_forward(z)
    return p


def softmax_backward(dout: np.ndarray, p: np.ndarray):
    # dz_i = p_i * (dout_i - sum_j dout_j p_j)
    dot = (dout * p).sum(axis=-1, keepdims=True)
    return p * (dout - dot)


def dropout_forward(x: np.ndarray, mask: np.ndarray):
    """mask is pre-scaled: 0 where dropped, 1/(1-p_drop) where kept."""
    return x * mask, mask


def dropout_backward(dout: np.ndarray, mask: np.ndarray):
    return dout * mask


def flatten_forward(x: np.ndarray):
    return x.reshape(x.shape[0], -1), x.shape


def flatten_backward(dout: np.ndarray, x_shape: tuple):
    return dout.reshape(x_shape)
