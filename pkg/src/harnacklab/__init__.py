"""harnacklab: numerical verification of heat-flow comparison inequalities
on rotationally symmetric model geometries."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .models import FlatCylinder, WarpedModel, build_model

__all__ = ["BACKEND", "FlatCylinder", "WarpedModel", "build_model", "__version__"]
