"""cantorlab: numerical laboratory for a Cantor-measure Dirichlet series."""

from .measure import (
    CantorSpec,
    DEFAULT_SPEC,
    MeasureAtoms,
    WickConstants,
    build_atoms,
    nu_hat,
    wick_constants,
)

__version__ = "0.1.0"

__all__ = [
    "CantorSpec",
    "DEFAULT_SPEC",
    "MeasureAtoms",
    "WickConstants",
    "build_atoms",
    "nu_hat",
    "wick_constants",
    "__version__",
]
