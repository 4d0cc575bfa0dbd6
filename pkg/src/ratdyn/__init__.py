"""Degree growth, dynamical degrees, entropy and graph volumes of rational self-maps of P^k."""

__version__ = "0.1.0"

from .monomial import MonomialMap, exact_dynamical_degrees, exact_entropy, homogenize
from .poly import HomPoly, gcd, gcd_many
from .ratmap import (DegreeBudget, IndeterminacyHit, MapError, ProjPoint, RationalMap, compose,
                     conjugate, degree_sequence, evaluate, iterate, load_map, map_from_document)

__all__ = [
    "DegreeBudget", "HomPoly", "IndeterminacyHit", "MapError", "MonomialMap", "ProjPoint",
    "RationalMap", "compose", "conjugate", "degree_sequence", "evaluate", "exact_dynamical_degrees",
    "exact_entropy", "gcd", "gcd_many", "homogenize", "iterate", "load_map", "map_from_document",
]
