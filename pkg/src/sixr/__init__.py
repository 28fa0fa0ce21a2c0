"""Homotopy classification of the singular surfaces of generic 6R arms on the 4-torus."""
from ._backend import BACKEND
from .catalog import HomotopyLabel, h2_catalog, h3_catalog, h4_catalog, validate_combination
from .classify import ClassificationReport, Options
from .kinematics import (
    DHRow,
    InvalidInput,
    ManipulatorModel,
    PositionerModel,
    det_jacobian,
    forward_kinematics,
    jacobian_corank,
    spatial_jacobian,
)
from .search import DHRanges, search_class
from .torus_field import GridSpec, fourier_degree, sample_field, sign_field

__version__ = "0.1.0"
