"""Bar-Natan tangle invariants, immersed curves and wrapped Floer pairing
for pointed 4-ended tangles."""

from .fields import Field, Scalar, field_make, scalar_arith
from .algebra import AlgebraElement, PathBasis
from .complexes import ComplexOverB, Generator, KHComplex, KHGenerator

__all__ = [
    "Field", "Scalar", "field_make", "scalar_arith",
    "AlgebraElement", "PathBasis",
    "ComplexOverB", "Generator", "KHComplex", "KHGenerator",
]
