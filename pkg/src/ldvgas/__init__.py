"""1D BGK kinetic solver on local, time-adaptive velocity grids."""

from .cases import (
    CASE_NAMES,
    HEAT_TRANSFER_KNUDSEN,
    Band,
    CaseSpec,
    cell_centers,
    free_transport_exact,
    initial_moments,
    make_case,
)
from .cli import (
    ProfileRecord,
    RunConfig,
    RunResult,
    compare_profiles,
    emit_config,
    parse_config,
    plateau_width,
    profiles,
    run_from_config,
    simulate,
)
from .grid import (
    MomentVector,
    VelocityGrid,
    build_global_grid,
    build_local_grid,
    extend_grid,
    maxwellian_support_bounds,
    moments,
)
from .maxwellian import GasModel, continuous_maxwellian, discrete_maxwellian
from .scheme_dvm import DvmState, dvm_state, dvm_step, global_grid_for
from .scheme_ldv import (
    CellState,
    StepDiagnostics,
    initial_row,
    ldv_step,
    select_timestep,
)

__version__ = "0.1.0"

__all__ = [
    "Band",
    "CASE_NAMES",
    "CaseSpec",
    "CellState",
    "DvmState",
    "GasModel",
    "HEAT_TRANSFER_KNUDSEN",
    "MomentVector",
    "ProfileRecord",
    "RunConfig",
    "RunResult",
    "StepDiagnostics",
    "VelocityGrid",
    "build_global_grid",
    "build_local_grid",
    "cell_centers",
    "compare_profiles",
    "continuous_maxwellian",
    "discrete_maxwellian",
    "dvm_state",
    "dvm_step",
    "emit_config",
    "extend_grid",
    "free_transport_exact",
    "global_grid_for",
    "initial_moments",
    "initial_row",
    "ldv_step",
    "make_case",
    "maxwellian_support_bounds",
    "moments",
    "parse_config",
    "plateau_width",
    "profiles",
    "run_from_config",
    "select_timestep",
    "simulate",
    "__version__",
]
