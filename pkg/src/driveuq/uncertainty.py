"""MC-dropout uncertainty: predictive moments, dispersion measures, tau calibration.

Regression nets report a predictive mean and variance; classification nets
report variation ratio, predictive entropy, and mutual information computed
from T stochastic softmax passes. Entropies are in nats.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .nn import CLASSIFICATION, REGRESSION, STOCHASTIC, Network, TrainConfig, train
from .nn.network import _seed_key, forward_batch, run_layers

REGRESSION_KIND = "regression"
CLASSIFICATION_KIND = "classification"

DEFAULT_T = 128

# 2^20 passes is the largest enumeration we are willing to run exactly.
_ENUM_LIMIT = 20


@dataclass(frozen=True)
class PassSamples:
    """Outputs of T stochastic forward passes for one input.

    Regression: values has shape (T,), one steering angle per pass.
    Classification: values has shape (T, C), each row a softmax distribution.
    """

    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in (REGRESSION_KIND, CLASSIFICATION_KIND):
            raise ValueError(f"unknown sample kind {self.kind!r}")
        v = np.asarray(self.values, dtype=np.float64)
        if v.size == 0 or v.shape[0] < 1:
            raise ValueError("need at least one pass")
        if not np.isfinite(v).all():
            raise ValueError("pass samples contain non-finite values")
        if self.kind == REGRESSION_KIND:
            if v.ndim != 1:
                raise ValueError("regression samples must be a 1-D vector")
        else:
            if v.ndim != 2:
                raise ValueError("classification samples must be a T x C matrix")
            if (v < 0).any():
                raise ValueError("probabilities must be nonnegative")
            sums = v.sum(axis=1)
            if np.abs(sums - 1.0).max() > 1e-9:
                raise ValueError("each classification row must sum to 1")
        object.__setattr__(self, "values", v)

    @property
    def n_passes(self) -> int:
        return self.values.shape[0]

    @property
    def n_classes(self) -> int:
        if self.kind != CLASSIFICATION_KIND:
            raise ValueError("n_classes is only defined for classification samples")
        return self.values.shape[1]


@dataclass(frozen=True)
class PrecisionParams:
    """Inputs and result of the model-precision formula tau = l^2 p / (2 N lambda)."""

    length_scale: float
    p_keep: float
    n_train: int
    l2_lambda: float
    tau: float

    def __post_init__(self):
        if self.length_scale <= 0 or self.l2_lambda <= 0 or self.tau <= 0:
            raise ValueError("length_scale, l2_lambda, and tau must be positive")
        if not 0 < self.p_keep <= 1:
            raise ValueError("p_keep must lie in (0, 1]")
        if self.n_train < 1:
            raise ValueError("n_train must be a positive integer")


def precision_params(length_scale: float, p_keep: float, n_train: int,
                     l2_lambda: float) -> PrecisionParams:
    """PrecisionParams with tau derived from the formula (the consistent way to build one)."""
    return PrecisionParams(length_scale, p_keep, n_train, l2_lambda,
                           compute_tau(length_scale, p_keep, n_train, l2_lambda))


@dataclass(frozen=True)
class UncertaintyReport:
    """Per-frame summary: steering prediction in degrees plus the uncertainty measures.

    Regression fills variance; classification fills the remaining fields.
    """

    prediction: float
    variance: float | None = None
    variation_ratio: float | None = None
    entropy: float | None = None
    mutual_information: float | None = None
    mode_class: int | None = None
    mode_freq: int | None = None


def mc_samples(net: Network, x: np.ndarray, n_passes: int = DEFAULT_T,
               seed: int = 0) -> PassSamples:
    """Run n_passes stochastic forwards with independent per-pass masks.

    Pass t draws its masks from (seed, t), so results do not depend on
    evaluation order. Deterministic given (net, x, seed).
    """
    if n_passes < 1:
        raise ValueError("n_passes must be at least 1")
    x = np.asarray(x, dtype=np.float64)
    xs = np.broadcast_to(x, (n_passes,) + x.shape)
    out = forward_batch(net, xs, mode=STOCHASTIC, seed=seed)
    if net.spec.head == REGRESSION:
        return PassSamples(REGRESSION_KIND, out.reshape(n_passes))
    return PassSamples(CLASSIFICATION_KIND, out)


def _require(s: PassSamples, kind: str):
    if s.kind != kind:
        raise ValueError(f"expected {kind} samples, got {s.kind}")


def predictive_mean(s: PassSamples) -> float:
    """Mean of the T regression samples."""
    _require(s, REGRESSION_KIND)
    return float(s.values.mean())


def predictive_variance(s: PassSamples, tau: float) -> float:
    """tau^-1 + (1/T) sum y_t^2 - mean^2 (population second-moment convention)."""
    _require(s, REGRESSION_KIND)
    if tau <= 0:
        raise ValueError("tau must be positive")
    y = s.values
    m = y.mean()
    return float(1.0 / tau + (y * y).mean() - m * m)


def compute_tau(length_scale: float, p_keep: float, n_train: int,
                l2_lambda: float) -> float:
    """Model precision l^2 * p_keep / (2 * N * lambda)."""
    if length_scale <= 0:
        raise ValueError("length_scale must be positive")
    if not 0 < p_keep <= 1:
        raise ValueError("p_keep must lie in (0, 1]")
    if n_train < 1:
        raise ValueError("n_train must be a positive integer")
    if l2_lambda <= 0:
        raise ValueError("l2_lambda must be positive")
    return length_scale * length_scale * p_keep / (2.0 * n_train * l2_lambda)


def _pass_labels(s: PassSamples) -> np.ndarray:
    # argmax takes the first maximum, i.e. the lowest class index on ties
    return np.argmax(s.values, axis=1)


def mode_and_freq(s: PassSamples) -> tuple[int, int]:
    """Most frequent per-pass argmax label and its count; ties -> lowest class."""
    _require(s, CLASSIFICATION_KIND)
    counts = np.bincount(_pass_labels(s), minlength=s.n_classes)
    mode = int(np.argmax(counts))
    return mode, int(counts[mode])


def variation_ratio(s: PassSamples) -> float:
    """1 - mode_freq / T; zero iff every pass picks the same label."""
    _, freq = mode_and_freq(s)
    return 1.0 - freq / s.n_passes


def _entropy_nats(p: np.ndarray) -> float:
    # 0 ln 0 := 0
    safe = np.where(p > 0.0, p, 1.0)
    return float(-(p * np.log(safe)).sum())


def predictive_entropy(s: PassSamples) -> float:
    """Entropy (nats) of the mean softmax distribution over passes."""
    _require(s, CLASSIFICATION_KIND)
    return _entropy_nats(s.values.mean(axis=0))


def mutual_information(s: PassSamples) -> float:
    """Entropy of the mean distribution minus mean per-pass entropy (nats).

    Nonnegative by Jensen; clamped at 0 against float round-off when all
    passes are nearly identical.
    """
    _require(s, CLASSIFICATION_KIND)
    v = s.values
    safe = np.where(v > 0.0, v, 1.0)
    mean_row_entropy = float(-(v * np.log(safe)).sum() / s.n_passes)
    return max(0.0, predictive_entropy(s) - mean_row_entropy)


def summarize_regression(s: PassSamples, tau: float) -> UncertaintyReport:
    return UncertaintyReport(prediction=predictive_mean(s),
                             variance=predictive_variance(s, tau))


def summarize_classification(s: PassSamples,
                             class_angles: np.ndarray | None = None) -> UncertaintyReport:
    """Report for classification samples; class_angles maps class index to degrees."""
    mode, freq = mode_and_freq(s)
    pred = float(class_angles[mode]) if class_angles is not None else float(mode)
    return UncertaintyReport(
        prediction=pred,
        variation_ratio=1.0 - freq / s.n_passes,
        entropy=predictive_entropy(s),
        mutual_information=mutual_information(s),
        mode_class=mode,
        mode_freq=freq,
    )


def _droppable_layout(spec) -> list[tuple[int, tuple, int, float]]:
    """(layer index, activation shape, unit count, p_drop) per enumerable dropout layer."""
    out = []
    for i in spec.dropout_layer_indices():
        p = spec.layers[i].p_drop
        if p > 0.0:
            shape = spec.layer_output_shape(i)
            out.append((i, shape, int(np.prod(shape)), p))
    return out


def _enumerated_passes(net: Network, x: np.ndarray, chunk: int = 4096):
    """Yield (weights, outputs) over every dropout mask of an enumerable net.

    Bit u of the mask index means unit u is kept; kept units are scaled by
    1/(1-p) exactly as in a stochastic pass, and each mask is weighted by its
    Bernoulli probability. Weights over all chunks sum to 1.
    """
    spec = net.spec
    layout = _droppable_layout(spec)
    k = sum(n for _, _, n, _ in layout)
    if k > _ENUM_LIMIT:
        raise ValueError(
            f"{k} droppable units exceed the 2^{_ENUM_LIMIT} enumeration limit")
    x = np.asarray(x, dtype=np.float64)
    p_unit = (np.concatenate([np.full(n, p) for _, _, n, p in layout])
              if layout else np.zeros(0))
    total = 1 << k
    bit_cols = np.arange(k, dtype=np.uint64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        n = idx.size
        bits = ((idx[:, None] >> bit_cols) & 1).astype(np.float64)
        weights = np.prod(np.where(bits == 1.0, 1.0 - p_unit, p_unit), axis=1)
        masks: list = [None] * len(spec.layers)
        off = 0
        for li, shape, units, p in layout:
            block = bits[:, off:off + units].reshape((n,) + shape)
            masks[li] = block / (1.0 - p)
            off += units
        for li in spec.dropout_layer_indices():
            if masks[li] is None:  # p_drop == 0 layers always keep everything
                masks[li] = np.ones((n,) + spec.layer_output_shape(li))
        xs = np.broadcast_to(x, (n,) + x.shape)
        out, _ = run_layers(net, xs, masks)
        yield weights, out


def exact_predictive_distribution(net: Network, x: np.ndarray) -> np.ndarray:
    """Exact dropout-averaged softmax output by enumerating all 2^k masks.

    Only feasible for tiny nets (k <= 20 droppable units); used as a
    convergence oracle for MC sampling.
    """
    if net.spec.head != CLASSIFICATION:
        raise ValueError("exact distribution is defined for classification nets")
    acc = np.zeros(net.spec.n_classes)
    total_w = 0.0
    for weights, out in _enumerated_passes(net, x):
        acc += weights @ out
        total_w += weights.sum()
    return acc / total_w


def _net_p_keep(spec) -> float:
    rates = {spec.layers[i].p_drop for i in spec.dropout_layer_indices()}
    if not rates:
        return 1.0
    if len(rates) > 1:
        raise ValueError("mixed dropout rates; pass p_keep explicitly")
    return 1.0 - rates.pop()


def calibrate_tau(data, l_grid, lambda_grid, *, net_spec=None,
                  train_cfg: TrainConfig | None = None, n_passes: int = 32,
                  val_fraction: float = 0.2, seed: int = 0) -> PrecisionParams:
    """Grid-search (l, lambda) by validation predictive log-likelihood.

    Trains one regression net per lambda (L2 set to that lambda), draws MC
    samples on the held-out split, and scores every (l, lambda) pair by
    Gaussian negative log-likelihood under mean/variance with
    tau = l^2 p / (2 N lambda). Ties break toward smaller lambda, then
    smaller l. N is the training-split size the winning net actually saw.
    """
    from . import datakit

    l_grid = [float(v) for v in l_grid]
    lambda_grid = [float(v) for v in lambda_grid]
    if not l_grid or not lambda_grid:
        raise ValueError("grids must be non-empty")
    if min(l_grid) <= 0 or min(lambda_grid) <= 0:
        raise ValueError("grid values must be positive")

    train_ds, val_ds = datakit.split(data, val_fraction, seed=seed)
    if len(val_ds) == 0 or len(train_ds) == 0:
        raise ValueError("both splits must be non-empty")

    if net_spec is None:
        net_spec = _default_calibration_spec(train_ds.images.shape[1:])
    if train_cfg is None:
        train_cfg = TrainConfig(epochs=15, batch_size=min(32, len(train_ds)),
                                learning_rate=1e-3, seed=seed)
    p_keep = _net_p_keep(net_spec)
    n_train = len(train_ds)

    # one training run per lambda; (mu, spread) on the val split reused across l
    per_lambda = {}
    for lam in sorted(set(lambda_grid)):
        spec_l = dataclasses.replace(net_spec, l2_lambda=lam)
        from .nn import init_network
        net0 = init_network(spec_l, seed=seed)
        fitted = train(net0, train_ds.images, train_ds.angles, train_cfg).network
        mu = np.empty(len(val_ds))
        s2 = np.empty(len(val_ds))
        for i in range(len(val_ds)):
            s = mc_samples(fitted, val_ds.images[i], n_passes=n_passes,
                           seed=_seed_key(seed, i))
            mu[i] = predictive_mean(s)
            s2[i] = (s.values * s.values).mean() - mu[i] ** 2
        per_lambda[lam] = (mu, s2)

    ys = val_ds.angles.astype(np.float64)
    best = None
    for lam in sorted(set(lambda_grid)):
        mu, s2 = per_lambda[lam]
        for ls in sorted(set(l_grid)):
            var = 1.0 / compute_tau(ls, p_keep, n_train, lam) + s2
            nll = float(np.mean(0.5 * np.log(2.0 * math.pi * var)
                                + (ys - mu) ** 2 / (2.0 * var)))
            key = (nll, lam, ls)
            if best is None or key < best:
                best = key
    _, lam_star, l_star = best
    return precision_params(l_star, p_keep, n_train, lam_star)


def _default_calibration_spec(input_shape):
    from .nn import NetworkSpec, dense, dropout, flatten, relu
    from .nn.presets import P_DROP

    return NetworkSpec(
        layers=(flatten(), dense(32), relu(), dropout(P_DROP),
                dense(16), relu(), dropout(P_DROP), dense(1)),
        head=REGRESSION,
        input_shape=tuple(input_shape),
    )
