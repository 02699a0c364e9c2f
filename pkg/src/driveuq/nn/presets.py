"""Steering-controller architecture presets.

Two scales of the same PilotNet-style layout:

* full -- 66x200x3 input, five convolutions (24/36/48/64/64 filters) and a
  100/50/10 dense stack.
* fast -- 33x100x3 input with conv channels halved (12/18/24/32/32); later
  kernels shrink to 3x3 so the stack still fits the smaller feature maps.
  The dense stack is unchanged.

Both heads share the trunk: regression ends in a single linear unit,
classification in a 200-way softmax (one class per 0.25 degree of steering).
Dropout (p=0.05) follows every parameterized layer except the first and the
last, and L2 with lambda=1e-6 applies to all but the final layer.
"""

from __future__ import annotations

from .network import (CLASSIFICATION, REGRESSION, NetworkSpec, conv, dense,
                      dropout, flatten, relu, softmax)

N_CLASSES = 200
P_DROP = 0.05
L2_LAMBDA = 1e-6

FULL_INPUT = (66, 200, 3)
FAST_INPUT = (33, 100, 3)


def _trunk(scale: str) -> list:
    if scale == "full":
        convs = [conv(24, 5, 2), conv(36, 5, 2), conv(48, 5, 2), conv(64, 3, 1), conv(64, 3, 1)]
    elif scale == "fast":
        convs = [conv(12, 5, 2), conv(18, 3, 2), conv(24, 3, 1), conv(32, 3, 1), conv(32, 3, 1)]
    else:
        raise ValueError(f"unknown scale {scale!r}")
    layers = []
    for i, c in enumerate(convs):
        layers += [c, relu()]
        if i > 0:  # no dropout after the first layer
            layers.append(dropout(P_DROP))
    layers.append(flatten())
    for units in (100, 50, 10):
        layers += [dense(units), relu(), dropout(P_DROP)]
    return layers


def build_preset(kind: str, scale: str = "full") -> NetworkSpec:
    """Architecture spec for a steering controller.

    kind: "regression" or "classification"; scale: "full" or "fast".
    """
    layers = _trunk(scale)
    if kind == REGRESSION:
        layers.append(dense(1))  # linear output, no dropout after the last layer
    elif kind == CLASSIFICATION:
        layers += [dense(N_CLASSES), softmax()]
    else:
        raise ValueError(f"unknown head kind {kind!r}")
    input_shape = FULL_INPUT if scale == "full" else FAST_INPUT
    return NetworkSpec(tuple(layers), head=kind, input_shape=input_shape, l2_lambda=L2_LAMBDA)
