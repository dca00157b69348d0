"""Exact deformation theory of tamely ramified mod-ell representations.

Modules:
    rings   finite fields GF(ell^r) and truncated Witt rings W_m(k)
    linalg  exact matrices, solving over k and W_m, canonical forms
    tame    tame pairs (tau, sigma), types, Hensel lifting, constructions
    cohom   local cohomology dimensions with an independent cocycle oracle
    ledger  global dimension bookkeeping and the GL_3 local classification
    cocycle finite models M^m x| G and separating-lift search
    cli     the ``galois-lift`` command-line front end
"""

from .errors import (
    GaloisLiftError,
    HenselDefect,
    InternalDefect,
    PreconditionError,
    SearchLimitExceeded,
)
from .rings import FieldSpec, WittSpec

__all__ = [
    "FieldSpec",
    "WittSpec",
    "GaloisLiftError",
    "HenselDefect",
    "InternalDefect",
    "PreconditionError",
    "SearchLimitExceeded",
]
