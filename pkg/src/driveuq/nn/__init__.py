"""Minimal feed-forward CNN engine: specs, forward passes, SGD training."""

from .layers import softmax_probs
from .losses import CROSS_ENTROPY, MSE, cross_entropy, mse
from .modelio import ModelFormatError, load_model, save_model
from .network import (CLASSIFICATION, DETERMINISTIC, REGRESSION, STOCHASTIC,
                      LayerSpec, Network, NetworkSpec, conv, dense, dropout,
                      flatten, forward, forward_batch, init_network, relu,
                      softmax)
from .presets import FAST_INPUT, FULL_INPUT, L2_LAMBDA, N_CLASSES, P_DROP, build_preset
from .train import TrainConfig, TrainingDiverged, TrainResult, train

__all__ = [
    "CLASSIFICATION", "CROSS_ENTROPY", "DETERMINISTIC", "FAST_INPUT", "FULL_INPUT",
    "L2_LAMBDA", "LayerSpec", "MSE", "ModelFormatError", "N_CLASSES", "Network",
    "NetworkSpec", "P_DROP", "REGRESSION", "STOCHASTIC", "TrainConfig",
    "TrainResult", "TrainingDiverged", "build_preset", "conv", "cross_entropy",
    "dense", "dropout", "flatten", "forward", "forward_batch", "init_network",
    "load_model", "mse", "relu", "save_model", "softmax", "softmax_probs",
    "train",
]
