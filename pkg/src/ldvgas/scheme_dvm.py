"""Global-grid discrete velocity baseline.

Every cell shares one velocity grid sized for the extremes of the flow,
so no reconstruction is ever needed: the transported value at a node is
the upwind combination of the same node in the neighboring cells.  The
step delegates to the frozen-grid variant of the local-grid step, so
the two methods coincide by construction; the pinned-grid equivalence
test guards that construction rather than comparing two hand-written
copies of the same formula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cases import CaseSpec
from .grid import (
    MomentVector,
    VelocityGrid,
    build_global_grid,
    maxwellian_support_bounds,
)
from .scheme_ldv import CellState, StepDiagnostics, initial_row, ldv_step


@dataclass(frozen=True)
class DvmState:
    """All cells on one shared grid; values has one row per cell."""

    grid: VelocityGrid
    values: np.ndarray
    moments: tuple[MomentVector, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != self.grid.size:
            raise ValueError(
                f"values shape {values.shape} does not match grid size {self.grid.size}"
            )
        if values.shape[0] != len(self.moments):
            raise ValueError("one moment vector per cell is required")
        object.__setattr__(self, "values", values)

    def to_cells(self) -> list[CellState]:
        return [
            CellState(self.grid, self.values[i], self.moments[i])
            for i in range(self.values.shape[0])
        ]

    @classmethod
    def from_cells(cls, cells) -> "DvmState":
        grid = cells[0].grid
        if any(c.grid is not grid for c in cells):
            raise ValueError("cells do not share a single grid")
        return cls(grid, np.array([c.values for c in cells]), tuple(c.moments for c in cells))


def global_grid_for(
    case: CaseSpec,
    *,
    span: float = 4.0,
    velocities: int | None = None,
    bounds: tuple[float, float] | None = None,
) -> VelocityGrid:
    """The shared grid of a run.

    Bounds and node count both default to the case's initial states
    (walls included) and can be overridden independently: explicit
    `bounds` need an explicit count, while an explicit count alone
    keeps the case-derived extent.
    """
    if bounds is not None:
        if velocities is None:
            raise ValueError("explicit bounds require an explicit node count")
        return VelocityGrid.uniform(bounds[0], bounds[1], velocities)
    fields = [(b.u, b.T) for b in case.bands]
    if case.wall_temperatures is not None:
        fields += [(0.0, T) for T in case.wall_temperatures]
    if velocities is not None:
        lo = min(maxwellian_support_bounds(u, T, case.gas.R, span)[0] for u, T in fields)
        hi = max(maxwellian_support_bounds(u, T, case.gas.R, span)[1] for u, T in fields)
        return VelocityGrid.uniform(lo, hi, velocities)
    return build_global_grid(fields, case.gas.R, span)


def dvm_state(
    case: CaseSpec,
    *,
    span: float = 4.0,
    velocities: int | None = None,
    bounds: tuple[float, float] | None = None,
    grid: VelocityGrid | None = None,
) -> DvmState:
    """Initial condition sampled as discrete Maxwellians on the global grid."""
    if grid is None:
        grid = global_grid_for(case, span=span, velocities=velocities, bounds=bounds)
    return DvmState.from_cells(initial_row(case, grid=grid))


def dvm_step(
    state: DvmState,
    case: CaseSpec,
    dt: float | None = None,
    *,
    cfl_safety: float = 1.0,
    fallback: bool = False,
    wall_cache: dict | None = None,
) -> tuple[DvmState, StepDiagnostics]:
    """One step of the global-grid method.

    Delegates to the frozen-grid local step with moment correction: on a
    shared grid the fluxed moment update telescopes into the quadrature
    moments of the transported values, so this is the standard method.
    """
    cells, diag = ldv_step(
        state.to_cells(),
        case,
        dt,
        variant="moment-correction",
        frozen=True,
        enlarge=False,
        cfl_safety=cfl_safety,
        fallback=fallback,
        wall_cache=wall_cache,
    )
    return DvmState.from_cells(cells), diag
