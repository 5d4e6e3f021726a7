"""Compression bases, spectral resolutions and functional calculus on
finite-dimensional order unit spaces (symmetric matrices and generalized
spin factors)."""

from .core import (ContractError, EigenError, Element, ModelContext, Projection,
                   RankAmbiguityError, bisection_norm, cone_contains, is_effect,
                   order_leq, order_unit_norm, parse_element)
from .kernels import BACKEND
from .matrix import MatrixModel, eigen_decompose
from .spin import NormOracle, SpinModel

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ContractError", "EigenError", "Element", "MatrixModel", "ModelContext",
    "NormOracle", "Projection", "RankAmbiguityError", "SpinModel", "bisection_norm",
    "cone_contains", "eigen_decompose", "is_effect", "order_leq", "order_unit_norm",
    "parse_element",
]
