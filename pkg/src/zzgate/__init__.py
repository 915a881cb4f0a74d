"""Coherent and depolarizing error analysis of compiled ZZ gates."""

__version__ = "0.1.0"

from .channels import CoherentErrorDraw, NoiseModel, make_depolarizing
from .gates import Kind, build_decomposition, r_zz
from .fidelity import gate_fidelity_numeric
from .experiments import SweepConfig, Grid, mc_average, recommend, sweep

__all__ = [
    "CoherentErrorDraw",
    "Grid",
    "Kind",
    "NoiseModel",
    "SweepConfig",
    "build_decomposition",
    "gate_fidelity_numeric",
    "make_depolarizing",
    "mc_average",
    "r_zz",
    "recommend",
    "sweep",
]
