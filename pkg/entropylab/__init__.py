"""entropylab - numerical checks of entropy inequalities for log-concave measures."""

__version__ = "0.1.0"
__author__ = "entropylab contributors"

from entropylab.core.config import get_settings, settings
from entropylab.core.errors import ConfigError, EntropyLabError
from entropylab.core.streams import RandomStream
from entropylab.estimators.entropy import estimate_entropy
from entropylab.lab.registry import CheckRegistry, get_registry
from entropylab.lab.reports import InequalityReport
from entropylab.observability.logger import configure_logging, get_logger
from entropylab.zoo.models import DensityModel

__all__ = [
    "get_settings",
    "settings",
    "configure_logging",
    "get_logger",
    "ConfigError",
    "EntropyLabError",
    "RandomStream",
    "estimate_entropy",
    "CheckRegistry",
    "get_registry",
    "InequalityReport",
    "DensityModel",
]
