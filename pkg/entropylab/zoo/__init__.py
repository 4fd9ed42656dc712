"""Density zoo: model types and the Borell kappa algebra.

Constructors (gaussian, exponential, product, affine_image, convolve, ...) live
in :mod:`entropylab.zoo.families`.
"""

from entropylab.zoo.kappa import kappa_convolution
from entropylab.zoo.models import ConvolutionModel, DensityModel, MaxDensity

__all__ = ["ConvolutionModel", "DensityModel", "MaxDensity", "kappa_convolution"]
