"""Exact Newton-polyhedral local resolution of singularities for curves and surfaces."""

from .arith import Matrix, adjugate, det, exterior_product
from .errors import SingresError
from .series import SparsePoly

__all__ = ["Matrix", "SparsePoly", "SingresError", "adjugate", "det", "exterior_product"]
__version__ = "0.1.0"
