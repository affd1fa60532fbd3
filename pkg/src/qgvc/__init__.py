"""Qudit circuit synthesis for the truncated SU(2) plaquette operator."""

from .ir import Circuit, GateOp, ResourceReport, Wire, resource_report
from .su2 import PlaquetteOperator, build_plaquette_operator

__all__ = [
    "Circuit",
    "GateOp",
    "PlaquetteOperator",
    "ResourceReport",
    "Wire",
    "build_plaquette_operator",
    "resource_report",
]
__version__ = "0.1.0"
