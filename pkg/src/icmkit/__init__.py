"""Informationally complete measurements: construction, verification, dilation and tomography."""
from .errors import (ConstructionError, DecompositionError, IcmkitError, InvariantViolation, ParseError,
                     ValidationError)
from .linalg import DEFAULT_TOL, Tolerance
from .measurement import (IcReport, Povm, SubspaceBasis, TensorEmbedding, canonical_ic_set, is_ic,
                          is_ic_over_subspace)

__version__ = "0.1.0"

__all__ = [
    "ConstructionError", "DEFAULT_TOL", "DecompositionError", "IcReport", "IcmkitError",
    "InvariantViolation", "ParseError", "Povm", "SubspaceBasis", "TensorEmbedding", "Tolerance",
    "ValidationError", "canonical_ic_set", "is_ic", "is_ic_over_subspace",
]
