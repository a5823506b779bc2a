"""Distributed-order fractional sub-diffusion on the line and the unit interval."""

from __future__ import annotations

from dodiff.dparam import DeltaMixture, TabulatedDensity, UniformBand
from dodiff.spectral import QuadratureSpec, SpectralContext, kernel, kernel_batch, kernel_curve

__all__ = [
    "DeltaMixture",
    "UniformBand",
    "TabulatedDensity",
    "QuadratureSpec",
    "SpectralContext",
    "kernel",
    "kernel_batch",
    "kernel_curve",
]
__version__ = "0.1.0"
