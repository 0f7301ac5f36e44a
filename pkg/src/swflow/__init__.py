"""Lattice simulator and diagnostics for a Seiberg-Witten-type gradient flow on flat tori."""

from .clifford import chirality_projector, fiber_dimension, gamma_matrices
from .errors import (
    BlowUpError,
    ConfigurationError,
    DomainError,
    FormatError,
    PreconditionError,
    ShapeError,
    SWFlowError,
    UnsupportedOperationError,
)
from .fields import ConnectionField, InitialDataSpec, SpinorField, gauge_transform, make_initial
from .flow import FlowHistory, FlowState, IntegratorConfig, cfl_dt, evolve, step
from .functional import ModelParams, flow_rhs, sw_functional
from .lattice import Lattice, build_lattice

__version__ = "0.1.0"
