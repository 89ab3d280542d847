"""Exact arithmetic in twisted polynomial, power-series, Laurent, and
Novikov rings over pluggable base rings, with the constructive splitting
invariants of their Whitehead groups: the constant part, the Witt-vector
torsion, and the nilpotent cokernel class.

All arithmetic is exact (gmpy2 rationals, residues, Gaussian rationals,
matrix rings, group rings); precision of truncated series is a tracked
contract, never a hint.
"""

from .series import (  # noqa: F401
    DEFAULT_PRECISION,
    LAURENT,
    NOVIKOV,
    POLY,
    SERIES,
    TwistCtx,
    TwistedSeries,
)
from .rings import (  # noqa: F401
    Automorphism,
    GaussianRationals,
    GroupRing,
    Integers,
    IntegersMod,
    MatrixRing,
    Rationals,
    RingCtx,
    identity_auto,
)
from .matrices import InvertiblePair, TwistedMatrix  # noqa: F401
from .modules import NilpotentPair, ProjectiveModule  # noqa: F401

__all__ = [
    "Automorphism", "DEFAULT_PRECISION", "GaussianRationals", "GroupRing",
    "Integers", "IntegersMod", "InvertiblePair", "LAURENT", "MatrixRing",
    "NOVIKOV", "NilpotentPair", "POLY", "ProjectiveModule", "Rationals",
    "RingCtx", "SERIES", "TwistCtx", "TwistedMatrix", "TwistedSeries",
    "identity_auto",
]
