"""Bond-additive entanglement tomography for spin-1/2 chains."""

from ._core import (
    BasisMismatch,
    CapacityError,
    ConvergenceError,
    ParameterError,
    counts,
    crossed_bonds,
    entropy,
    fit,
    page_entropy,
    representatives,
    simulate,
    spacing_ratios,
    spectral,
    version,
)

__version__ = version()

__all__ = [
    "BasisMismatch",
    "CapacityError",
    "ConvergenceError",
    "ParameterError",
    "counts",
    "crossed_bonds",
    "entropy",
    "fit",
    "page_entropy",
    "representatives",
    "simulate",
    "spacing_ratios",
    "spectral",
    "version",
]
