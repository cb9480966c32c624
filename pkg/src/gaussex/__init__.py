"""Extended Gaussian distributions, Gaussian systems and their compositional semantics."""

from . import category, extgauss, gauss, linalg, linrel, quadratic, willems
from .category import GaussExMorphism
from .errors import GaussExError, InternalInconsistency
from .extgauss import ExtendedGaussian
from .linalg import Subspace, ToleranceConfig
from .quadratic import PartialQuadratic
from .willems import GaussianSystem

__version__ = "0.1.0"

__all__ = [
    "category",
    "extgauss",
    "gauss",
    "linalg",
    "linrel",
    "quadratic",
    "willems",
    "ExtendedGaussian",
    "GaussExMorphism",
    "GaussExError",
    "GaussianSystem",
    "InternalInconsistency",
    "PartialQuadratic",
    "Subspace",
    "ToleranceConfig",
]
