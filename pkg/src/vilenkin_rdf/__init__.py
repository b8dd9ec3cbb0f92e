"""Vilenkin analysis on mixed-radix grids and numerical checks of a Rubio de Francia type inequality."""

__version__ = "0.1.0"

from .mixed_radix import CapacityError, RadixSequence
from .transform import GridFunction, SpectrumCoeffs, forward_transform, inverse_transform
from .partition import Rectangle, partition_interval, partition_rectangle
from .pipeline import SpectralFamily, apply_G, rdf_decompose, verify_main_inequality, verify_weak_inequality

__all__ = [
    "CapacityError",
    "GridFunction",
    "RadixSequence",
    "Rectangle",
    "SpectralFamily",
    "SpectrumCoeffs",
    "apply_G",
    "forward_transform",
    "inverse_transform",
    "partition_interval",
    "partition_rectangle",
    "rdf_decompose",
    "verify_main_inequality",
    "verify_weak_inequality",
]
