"""FPCA and functional diffusion maps for induction-motor fault analysis."""

from .fda import (
    FunctionalDataset,
    QuadratureScheme,
    SampleGrid,
    inner_product,
    l1_distance,
    l2_distance,
    l2_norm,
    trapezoid_weights,
)
from .fdm import FdmModel, FdmParams, Kernel, fit_fdm
from .fpca import FpcaModel, fit_fpca, transform
from .records import Channel, FaultSpec, SignalRecord

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "FaultSpec",
    "FdmModel",
    "FdmParams",
    "FpcaModel",
    "FunctionalDataset",
    "Kernel",
    "QuadratureScheme",
    "SampleGrid",
    "SignalRecord",
    "fit_fdm",
    "fit_fpca",
    "inner_product",
    "l1_distance",
    "l2_distance",
    "l2_norm",
    "transform",
    "trapezoid_weights",
]
