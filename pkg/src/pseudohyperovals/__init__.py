"""Pseudo-hyperovals, generalised quadrangles and their stabilisers over GF(2^f)."""

from .field import Field, make_field
from .geometry import GuardExceeded, ProjectivePoint, field_reduce
from .hyperovals import (
    Hyperoval,
    PseudoHyperoval,
    is_hyperoval,
    is_pseudo_hyperoval,
    lunelli_sce,
    regular_hyperoval,
)
from .linalg import MatrixGF, Subspace

__version__ = "0.1.0"

__all__ = [
    "Field",
    "GuardExceeded",
    "Hyperoval",
    "MatrixGF",
    "ProjectivePoint",
    "PseudoHyperoval",
    "Subspace",
    "field_reduce",
    "is_hyperoval",
    "is_pseudo_hyperoval",
    "lunelli_sce",
    "make_field",
    "regular_hyperoval",
]
