"""Binormal flow of non-lightlike curves in Minkowski 3-space.

Parallel frames, the vortex filament flow, and residual checks of its
equivalence with the NLS^- equation (timelike curves) and the nonlinear
heat system (spacelike curves).
"""

from . import curve, errors, flow, frames, generators, io, lorentz, pde
from .curve import DiscreteCurve, FrenetApparatus, Topology, frenet_apparatus
from .errors import VFEError
from .flow import FlowConfig, FlowHistory, run
from .frames import (CausalCase, ParallelFrameField, frame_by_rotation,
                     frame_by_transport)
from .lorentz import CausalClass, classify, cross, inner, norm
from .pde import ResidualReport, heat_residual, nls_residual, pde_residual

__version__ = "0.1.0"
