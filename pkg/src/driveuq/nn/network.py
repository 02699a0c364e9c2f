"""Network description, weight initialization, and forward passes.

A network is a spec (ordered layer descriptions plus a head kind) and a list
of per-layer weight dicts. All arithmetic runs in float64; seeds fully
determine stochastic behaviour. Stochastic forward passes keep dropout
active: each pass draws its masks from an RNG keyed by (seed..., pass_index),
so a batch of passes is reproducible regardless of evaluation order.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from . import layers as L

REGRESSION = "regression"
CLASSIFICATION = "classification"

DETERMINISTIC = "deterministic"
STOCHASTIC = "stochastic"

_KINDS = ("convolution", "dense", "relu", "softmax", "dropout", "flatten")


@dataclass(frozen=True)
class LayerSpec:
    """One layer: kind plus the parameters that kind needs."""

    kind: str
    filters: int = 0
    kernel: int = 0
    stride: int = 1
    units: int = 0
    p_drop: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.kind == "convolution":
            if self.filters <= 0 or self.kernel <= 0 or self.stride <= 0:
                raise ValueError("convolution needs positive filters/kernel/stride")
        if self.kind == "dense" and self.units <= 0:
            raise ValueError("dense needs positive units")
        if self.kind == "dropout" and not (0.0 <= self.p_drop < 1.0):
            raise ValueError("dropout needs 0 <= p_drop < 1")


def conv(filters: int, kernel: int, stride: int = 1) -> LayerSpec:
    return LayerSpec("convolution", filters=filters, kernel=kernel, stride=stride)


def dense(units: int) -> LayerSpec:
    return LayerSpec("dense", units=units)


def relu() -> LayerSpec:
    return LayerSpec("relu")


def softmax() -> LayerSpec:
    return LayerSpec("softmax")


def dropout(p_drop: float) -> LayerSpec:
    return LayerSpec("dropout", p_drop=p_drop)


def flatten() -> LayerSpec:
    return LayerSpec("flatten")


@dataclass(frozen=True)
class NetworkSpec:
    """Ordered layers, head kind, input shape (H, W, C), and L2 multiplier."""

    layers: tuple[LayerSpec, ...]
    head: str
    input_shape: tuple[int, int, int]
    l2_lambda: float = 0.0
    _shapes: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        if self.head not in (REGRESSION, CLASSIFICATION):
            raise ValueError(f"unknown head {self.head!r}")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be nonnegative")
        if len(self.input_shape) != 3 or any(d <= 0 for d in self.input_shape):
            raise ValueError("input_shape must be (H, W, C) with positive dims")
        object.__setattr__(self, "_shapes", self._infer_shapes())
        self._check_head()

    def _infer_shapes(self) -> tuple:
        """Per-layer output shapes; raises if consecutive layers are incompatible."""
        shapes = []
        cur = tuple(self.input_shape)
        for i, spec in enumerate(self.layers):
            if spec.kind == "convolution":
                if len(cur) != 3:
                    raise ValueError(f"layer {i}: convolution needs an (H, W, C) input")
                oh, ow = L.conv_out_hw(cur[0], cur[1], spec.kernel, spec.stride)
                if oh <= 0 or ow <= 0:
                    raise ValueError(f"layer {i}: kernel {spec.kernel} does not fit input {cur}")
                cur = (oh, ow, spec.filters)
            elif spec.kind == "dense":
                if len(cur) != 1:
                    raise ValueError(f"layer {i}: dense needs a flat input (insert flatten)")
                cur = (spec.units,)
            elif spec.kind == "flatten":
                cur = (int(np.prod(cur)),)
            elif spec.kind == "softmax":
                if len(cur) != 1:
                    raise ValueError(f"layer {i}: softmax needs a flat input")
            # relu / dropout keep the shape
            shapes.append(cur)
        return tuple(shapes)

    def _check_head(self):
        if not self.layers:
            raise ValueError("network needs at least one layer")
        last = self.layers[-1]
        if self.head == REGRESSION:
            if last.kind != "dense":
                raise ValueError("regression head must end in a linear dense layer")
        else:
            if last.kind != "softmax" or len(self.layers) < 2 or self.layers[-2].kind != "dense":
                raise ValueError("classification head must end in dense + softmax")

    @property
    def output_shape(self) -> tuple:
        return self._shapes[-1]

    @property
    def n_classes(self) -> int:
        if self.head != CLASSIFICATION:
            raise ValueError("n_classes is only defined for classification heads")
        return self.output_shape[0]

    def layer_input_shape(self, i: int) -> tuple:
        return tuple(self.input_shape) if i == 0 else self._shapes[i - 1]

    def layer_output_shape(self, i: int) -> tuple:
        return self._shapes[i]

    def param_layer_indices(self) -> list[int]:
        return [i for i, s in enumerate(self.layers) if s.kind in ("convolution", "dense")]

    def dropout_layer_indices(self) -> list[int]:
        return [i for i, s in enumerate(self.layers) if s.kind == "dropout"]

    def droppable_units(self) -> int:
        """Total activation count flowing through dropout layers."""
        return sum(int(np.prod(self.layer_output_shape(i))) for i in self.dropout_layer_indices())

    def to_dict(self) -> dict:
        out = {"head": self.head, "input_shape": list(self.input_shape),
               "l2_lambda": self.l2_lambda, "layers": []}
        for s in self.layers:
            d = {"kind": s.kind}
            if s.kind == "convolution":
                d.update(filters=s.filters, kernel=s.kernel, stride=s.stride)
            elif s.kind == "dense":
                d.update(units=s.units)
            elif s.kind == "dropout":
                d.update(p_drop=s.p_drop)
            out["layers"].append(d)
        return out

    @staticmethod
    def from_dict(d: dict) -> "NetworkSpec":
        known = {"head", "input_shape", "l2_lambda", "layers"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown spec keys: {sorted(extra)}")
        layer_specs = []
        for ld in d["layers"]:
            kind = ld["kind"]
            extra = set(ld) - {"kind", "filters", "kernel", "stride", "units", "p_drop"}
            if extra:
                raise ValueError(f"unknown layer keys: {sorted(extra)}")
            layer_specs.append(LayerSpec(kind, filters=ld.get("filters", 0),
                                         kernel=ld.get("kernel", 0), stride=ld.get("stride", 1),
                                         units=ld.get("units", 0), p_drop=ld.get("p_drop", 0.0)))
        return NetworkSpec(tuple(layer_specs), head=d["head"],
                           input_shape=tuple(d["input_shape"]),
                           l2_lambda=float(d.get("l2_lambda", 0.0)))


@dataclass
class Network:
    """A spec plus one weight dict per layer ({} for parameterless layers)."""

    spec: NetworkSpec
    weights: list[dict]

    def copy(self) -> "Network":
        return Network(self.spec, copy.deepcopy(self.weights))


def _glorot(rng: np.random.Generator, shape: tuple, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_network(spec: NetworkSpec, seed: int = 0) -> Network:
    """Glorot-uniform weights, zero biases; one child RNG per layer index."""
    weights: list[dict] = []
    for i, ls in enumerate(spec.layers):
        if ls.kind == "convolution":
            in_c = spec.layer_input_shape(i)[2]
            rng = np.random.default_rng(_seed_key(seed, i))
            fan_in = ls.kernel * ls.kernel * in_c
            fan_out = ls.kernel * ls.kernel * ls.filters
            w = _glorot(rng, (ls.kernel, ls.kernel, in_c, ls.filters), fan_in, fan_out)
            weights.append({"w": w, "b": np.zeros(ls.filters)})
        elif ls.kind == "dense":
            d_in = spec.layer_input_shape(i)[0]
            rng = np.random.default_rng(_seed_key(seed, i))
            w = _glorot(rng, (d_in, ls.units), d_in, ls.units)
            weights.append({"w": w, "b": np.zeros(ls.units)})
        else:
            weights.append({})
    return Network(spec, weights)


def _seed_key(*parts) -> list[int]:
    """Normalize seed components to the nonnegative ints SeedSequence expects."""
    return [int(p) & 0xFFFFFFFFFFFFFFFF for p in parts]


def scaled_mask(keep: np.ndarray, p_drop: float) -> np.ndarray:
    """Turn a boolean keep-mask into the multiplicative dropout mask."""
    return keep.astype(np.float64) * (1.0 / (1.0 - p_drop))


def sample_pass_masks(spec: NetworkSpec, seed, pass_index: int) -> list:
    """Masks for one stochastic pass, drawn from an RNG keyed by (seed, pass_index).

    `seed` may be an int or a tuple of ints (e.g. (run_seed, frame)).
    Returns a layer-aligned list; non-dropout entries are None. Masks cover a
    single sample (no batch axis).
    """
    base = seed if isinstance(seed, (tuple, list)) else (seed,)
    rng = np.random.default_rng(_seed_key(*base, pass_index))
    masks: list = []
    for i, ls in enumerate(spec.layers):
        if ls.kind == "dropout":
            shape = spec.layer_output_shape(i)
            keep = rng.random(shape) >= ls.p_drop
            masks.append(scaled_mask(keep, ls.p_drop))
        else:
            masks.append(None)
    return masks


def sample_batch_masks(spec: NetworkSpec, rng: np.random.Generator, n: int) -> list:
    """Training-style masks: one draw per dropout layer covering the whole batch."""
    masks: list = []
    for i, ls in enumerate(spec.layers):
        if ls.kind == "dropout":
            shape = (n,) + spec.layer_output_shape(i)
            keep = rng.random(shape) >= ls.p_drop
            masks.append(scaled_mask(keep, ls.p_drop))
        else:
            masks.append(None)
    return masks


def run_layers(net: Network, xs: np.ndarray, masks: list | None, want_caches: bool = False):
    """Run the batch through every layer. masks=None means deterministic mode.

    Dropout masks may have a batch axis or be single-sample (broadcast).
    """
    caches = [] if want_caches else None
    a = xs
    for i, ls in enumerate(net.spec.layers):
        if ls.kind == "convolution":
            a, cache = L.conv_forward(a, net.weights[i]["w"], net.weights[i]["b"], ls.stride)
        elif ls.kind == "dense":
            a, cache = L.dense_forward(a, net.weights[i]["w"], net.weights[i]["b"])
        elif ls.kind == "relu":
            a, cache = L.relu_forward(a)
        elif ls.kind == "softmax":
            a, cache = L.softmax_forward(a)
        elif ls.kind == "flatten":
            a, cache = L.flatten_forward(a)
        else:  # dropout
            if masks is None or masks[i] is None:
                cache = None  # deterministic: identity
            else:
                a, cache = L.dropout_forward(a, masks[i])
        if want_caches:
            caches.append(cache)
    return a, caches


def backward_layers(net: Network, caches: list, dout: np.ndarray):
    """Backpropagate dout through cached layers; returns (param grads, dinput)."""
    grads: list[dict] = [{} for _ in net.spec.layers]
    d = dout
    for i in range(len(net.spec.layers) - 1, -1, -1):
        ls = net.spec.layers[i]
        cache = caches[i]
        if ls.kind == "convolution":
            d, dw, db = L.conv_backward(d, cache)
            grads[i] = {"w": dw, "b": db}
        elif ls.kind == "dense":
            d, dw, db = L.dense_backward(d, cache)
            grads[i] = {"w": dw, "b": db}
        elif ls.kind == "relu":
            d = L.relu_backward(d, cache)
        elif ls.kind == "softmax":
            d = L.softmax_backward(d, cache)
        elif ls.kind == "flatten":
            d = L.flatten_backward(d, cache)
        else:  # dropout
            if cache is not None:
                d = L.dropout_backward(d, cache)
    return grads, d


def _check_input(net: Network, x: np.ndarray, batched: bool):
    expect = tuple(net.spec.input_shape)
    got = tuple(x.shape[1:]) if batched else tuple(x.shape)
    if got != expect:
        raise ValueError(f"input shape {got} does not match network input {expect}")
    if not np.isfinite(x).all():
        raise ValueError("input contains non-finite values")


def forward(net: Network, x: np.ndarray, mode: str = DETERMINISTIC,
            seed=0, pass_index: int = 0) -> np.ndarray:
    """Single-input forward pass. Deterministic mode ignores the seed.

    In stochastic mode dropout stays active; masks come from
    (seed, pass_index), so the same triple always yields the same output.
    """
    x = np.asarray(x, dtype=np.float64)
    _check_input(net, x, batched=False)
    if mode == DETERMINISTIC:
        masks = None
    elif mode == STOCHASTIC:
        masks = sample_pass_masks(net.spec, seed, pass_index)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    out, _ = run_layers(net, x[None], masks)
    out = out[0]
    if not np.isfinite(out).all():
        raise FloatingPointError("forward pass produced non-finite activations")
    return out


def forward_batch(net: Network, xs: np.ndarray, mode: str = DETERMINISTIC, seed=0) -> np.ndarray:
    """Batched forward. In stochastic mode row t uses pass_index = t."""
    xs = np.asarray(xs, dtype=np.float64)
    _check_input(net, xs, batched=True)
    if mode == DETERMINISTIC:
        masks = None
    elif mode == STOCHASTIC:
        n = xs.shape[0]
        per_pass = [sample_pass_masks(net.spec, seed, t) for t in range(n)]
        masks = []
        for i, ls in enumerate(net.spec.layers):
            if ls.kind == "dropout":
                masks.append(np.stack([pm[i] for pm in per_pass]))
            else:
                masks.append(None)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    out, _ = run_layers(net, xs, masks)
    if not np.isfinite(out).all():
        raise FloatingPointError("forward pass produced non-finite activations")
    return out
