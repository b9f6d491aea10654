"""Multi-scale 1D gas solver: ES-BGK kinetics, Euler/Navier-Stokes fluids,
and a moment-realizability driven hybrid of the two."""

from .grids import SpatialGrid, VelocityGrid
from .moments import (
    MacroState,
    RealizabilityBundle,
    conserved_moments,
    heat_flux,
    l1_distance,
    macro_state,
    primitive_moments,
    realizability_moments,
    split_conserved,
    stress_tensor,
)
from .equilibrium import (
    CEClosure,
    anisotropic_gaussian,
    ce_coefficients,
    ce_truncation,
    discrete_equilibrium,
    discrete_gaussian,
    es_tensor,
    maxwellian,
)
from .kinetic import collision_step, entropy, kinetic_cfl_dt, kinetic_step, transport_step
from .fluid import conserved_from_primitive, fluid_cfl_dt, fluid_step, parabolic_dt
from .indicators import (
    FieldGradients,
    IndicatorConfig,
    fluid_breakdown,
    kinetic_to_fluid,
    v_matrix_burnett,
    v_matrix_ns,
)
from .hybrid import (
    FLUID,
    KINETIC,
    HybridConfig,
    HybridState,
    classify,
    hybrid_step,
    lift,
    project,
)
from .cases import CaseConfig, build_case

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
