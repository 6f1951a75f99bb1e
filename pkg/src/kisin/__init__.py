"""Rank-2 etale phi-modules over F_q((u)), the Bruhat-Tits tree of PGL_2 and
Kisin varieties: membership, enumeration of F_q-points and certified
connecting curves."""

from ._core import BACKEND
from .gf import GF, FieldElement, field
from .lattice import Lattice, Mat2, VertexClass
from .phimod import PhiModule, fixed_point, is_simple, standard_module
from .series import LaurentElement
from .tree import BuildingPoint, dist
from .variety import Cochar, KisinPoint, enumerate_points, is_member, radius_bound, solve_det_classes

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BuildingPoint",
    "Cochar",
    "FieldElement",
    "GF",
    "KisinPoint",
    "LaurentElement",
    "Lattice",
    "Mat2",
    "PhiModule",
    "VertexClass",
    "dist",
    "enumerate_points",
    "field",
    "fixed_point",
    "is_member",
    "is_simple",
    "radius_bound",
    "solve_det_classes",
    "standard_module",
]
