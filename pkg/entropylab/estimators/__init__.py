"""Entropy, entropy power and relative entropy estimators."""

from entropylab.estimators.divergence import (
    estimate_moments,
    gaussian_entropy,
    relative_entropy_to_gaussian,
    relative_entropy_to_independence,
    relative_entropy_to_uniform,
)
from entropylab.estimators.entropy import (
    convolution_entropy,
    entropy_power,
    estimate_convolution_density,
    estimate_entropy,
    information_content,
    knn_entropy,
    plugin_entropy,
)
from entropylab.estimators.estimate import DensityEstimate, EntropyEstimate

__all__ = [
    "DensityEstimate",
    "EntropyEstimate",
    "convolution_entropy",
    "entropy_power",
    "estimate_convolution_density",
    "estimate_entropy",
    "estimate_moments",
    "gaussian_entropy",
    "information_content",
    "knn_entropy",
    "plugin_entropy",
    "relative_entropy_to_gaussian",
    "relative_entropy_to_independence",
    "relative_entropy_to_uniform",
]
